#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpz/errors.hpp"
#include "kpz/scenario.hpp"

namespace {

int fail(const char* type, const std::string& message) {
    nlohmann::json err;
    err["error"] = {{"type", type}, {"message", message}};
    std::cout << err.dump() << "\n";
    return 1;
}

std::vector<double> parse_window(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    if (out.size() != 4)
        throw kpz::DomainError("render: window must be t0,t1,x0,x1");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kpzldp - n-point KPZ upper-tail large deviation toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".", shape_path, fig_path, window_text;
    bool verbose = false;
    int fan = 24;

    CLI::App* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory (default: current)");
    run->add_flag("--verbose", verbose, "print extra detail");

    CLI::App* render = app.add_subcommand("render", "render a spacetime figure");
    render->add_option("shape", shape_path, "shape JSON file")->required();
    render->add_option("--window", window_text, "t0,t1,x0,x1")->required();
    render->add_option("--out", fig_path, "output SVG path")->required();
    render->add_option("--fan", fan, "characteristic fan size (default 24)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const kpz::ScenarioReport report =
                kpz::run_scenario_file(scenario_path, out_dir, verbose);
            std::cout << report.summary << "\n";
            for (const std::string& f : report.written)
                std::cout << "wrote " << f << "\n";
            return 0;
        }
        kpz::render_shape_file(shape_path, fig_path, parse_window(window_text), fan);
        std::cout << "wrote " << fig_path << "\n";
        return 0;
    } catch (const kpz::DomainError& e) {
        return fail("domain", e.what());
    } catch (const kpz::NumericError& e) {
        return fail("numeric", e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
}
