#pragma once

#include <string>
#include <vector>

namespace kpz {

// Result of running one scenario file: a one-line summary for the
// terminal plus the list of files written under the output directory.
struct ScenarioReport {
    std::string kind;
    std::string summary;
    std::vector<std::string> written;
};

// Parses and runs a scenario JSON document.  Scenario kinds: rate,
// dual, shape, tree-check, symmetry-scan, simulate.  Outputs are
// written only when declared in the scenario's "outputs" object; paths
// resolve relative to out_dir.  verbose adds detail lines to summary.
ScenarioReport run_scenario_text(const std::string& json_text,
                                 const std::string& out_dir, bool verbose);
ScenarioReport run_scenario_file(const std::string& path,
                                 const std::string& out_dir, bool verbose);

// Renders the spacetime figure for a shape JSON document (either a
// shape scenario output with an embedded "config", or a bare
// {t, xs, hs} object).  window = {t0, t1, x0, x1}.
void render_shape_file(const std::string& shape_path, const std::string& out_path,
                       const std::vector<double>& window, int fan);

} // namespace kpz
