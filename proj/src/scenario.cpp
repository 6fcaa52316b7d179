#include "kpz/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kpz/corridor.hpp"
#include "kpz/legendre.hpp"
#include "kpz/limit_shape.hpp"
#include "kpz/rate.hpp"
#include "kpz/she_sim.hpp"
#include "kpz/svg.hpp"

namespace kpz {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports line/column in the message; keep it verbatim
        throw DomainError(std::string("scenario parse error: ") + e.what());
    }
}

ProbeConfig config_from(const json& doc) {
    // accept t/xs/hs either at top level or nested under "config"
    const json& src = doc.contains("config") ? doc.at("config") : doc;
    ProbeConfig config;
    if (!src.contains("t") || !src.contains("xs") || !src.contains("hs"))
        throw DomainError("scenario: needs fields t, xs, hs");
    config.t = src.at("t").get<double>();
    config.xs = src.at("xs").get<std::vector<double>>();
    config.hs = src.at("hs").get<std::vector<double>>();
    config.validate();
    return config;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct Writer {
    fs::path dir;
    const json* outputs;
    std::vector<std::string>* written;

    void emit(const char* key, const std::string& content) const {
        if (outputs == nullptr || !outputs->contains(key))
            return;
        const fs::path path = dir / outputs->at(key).get<std::string>();
        if (path.has_parent_path())
            fs::create_directories(path.parent_path());
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw NumericError("scenario: cannot open output file " + path.string());
        os << content;
        written->push_back(path.string());
    }
    void emit_bytes(const char* key, const std::vector<char>& bytes) const {
        if (outputs == nullptr || !outputs->contains(key))
            return;
        const fs::path path = dir / outputs->at(key).get<std::string>();
        if (path.has_parent_path())
            fs::create_directories(path.parent_path());
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw NumericError("scenario: cannot open output file " + path.string());
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        written->push_back(path.string());
    }
};

std::string run_rate(const json& doc, const Writer& w, bool verbose, std::string& extra) {
    const ProbeConfig config = config_from(doc);
    const RateResult result = rate(config);
    w.emit("json", rate_result_to_json(result));
    w.emit("profile_json", profile_to_json(build_profile(config)));
    std::ostringstream os;
    os << "rate: value=" << fmt(result.value) << " probes=" << config.size()
       << " reduced=" << result.reduced_set.size() << "/" << config.size();
    if (verbose) {
        std::ostringstream vs;
        vs << "  gradient = [";
        for (std::size_t i = 0; i < result.gradient.size(); ++i)
            vs << (i ? ", " : "") << fmt(result.gradient[i]);
        vs << "]\n  class = " << to_string(classify(config));
        extra = vs.str();
    }
    return os.str();
}

std::string run_dual(const json& doc, const Writer& w, bool verbose, std::string& extra) {
    if (!doc.contains("t") || !doc.contains("xs") || !doc.contains("masses"))
        throw DomainError("scenario: dual needs fields t, xs, masses");
    const double t = doc.at("t").get<double>();
    const auto xs = doc.at("xs").get<std::vector<double>>();
    const auto masses = doc.at("masses").get<std::vector<double>>();
    const DualPair pair = lyapunov_from_duality(t, xs, masses);
    w.emit("json", dual_pair_to_json(pair));
    std::ostringstream os;
    os << "dual: L=" << fmt(pair.lyapunov) << " probes=" << xs.size();
    if (verbose) {
        std::ostringstream vs;
        vs << "  heights = [";
        for (std::size_t i = 0; i < pair.config.hs.size(); ++i)
            vs << (i ? ", " : "") << fmt(pair.config.hs[i]);
        vs << "]";
        extra = vs.str();
    }
    return os.str();
}

std::string run_shape(const json& doc, const Writer& w, bool, std::string&) {
    const ProbeConfig config = config_from(doc);
    const LimitShape shape = build_limit_shape(config);
    w.emit("shape_json", shock_tree_to_json(shape.tree));

    if (w.outputs != nullptr && w.outputs->contains("grid_csv")) {
        if (!doc.contains("grid"))
            throw DomainError("scenario: shape grid_csv output needs a grid object");
        const json& g = doc.at("grid");
        const double t0 = g.at("t0").get<double>();
        const double t1 = g.at("t1").get<double>();
        const double x0 = g.at("x0").get<double>();
        const double x1 = g.at("x1").get<double>();
        const double dt = g.at("dt").get<double>();
        const double dx = g.at("dx").get<double>();
        if (!(t0 > 0.0) || !(dt > 0.0) || !(dx > 0.0) || t1 < t0 || x1 < x0)
            throw DomainError("scenario: malformed shape grid");
        std::ostringstream csv;
        csv << "t,x,psi\n";
        char buf[96];
        const long nt = std::lround((t1 - t0) / dt);
        const long nx = std::lround((x1 - x0) / dx);
        for (long it = 0; it <= nt; ++it) {
            const double t = std::min(t0 + static_cast<double>(it) * dt, shape.tree.t_term);
            for (long ix = 0; ix <= nx; ++ix) {
                const double x = x0 + static_cast<double>(ix) * dx;
                std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", t, x,
                              shape_eval(shape, t, x));
                csv << buf;
            }
        }
        w.emit("grid_csv", csv.str());
    }

    if (w.outputs != nullptr && w.outputs->contains("svg")) {
        RenderOptions opt;
        if (doc.contains("window")) {
            const auto win = doc.at("window").get<std::vector<double>>();
            if (win.size() != 4)
                throw DomainError("scenario: window must be [t0,t1,x0,x1]");
            opt.t0 = win[0];
            opt.t1 = win[1];
            opt.x0 = win[2];
            opt.x1 = win[3];
        } else {
            opt.t0 = 0.0;
            opt.t1 = shape.tree.t_term;
            opt.x0 = config.xs.front() - 2.0;
            opt.x1 = config.xs.back() + 2.0;
        }
        w.emit("svg", render_svg(shape, opt));
    }

    std::ostringstream os;
    os << "shape: blocks=" << shape.tree.blocks.size()
       << " segments=" << shape.tree.segments.size()
       << " merges=" << shape.tree.events.size();
    return os.str();
}

std::string run_tree_check(const json& doc, const Writer& w, bool, std::string&) {
    const ProbeConfig config = config_from(doc);
    if (!doc.contains("t_mid"))
        throw DomainError("scenario: tree-check needs field t_mid");
    const TreeCheckResult result =
        tree_decomposition_check(config, doc.at("t_mid").get<double>());
    w.emit("json", tree_check_to_json(result));
    std::ostringstream os;
    os << "tree-check: lhs=" << fmt(result.lhs) << " rhs=" << fmt(result.rhs)
       << " gap=" << fmt(std::fabs(result.lhs - result.rhs))
       << " clusters=" << result.clusters.size();
    return os.str();
}

std::string run_symmetry_scan(const json& doc, const Writer& w, bool, std::string&) {
    if (!doc.contains("m"))
        throw DomainError("scenario: symmetry-scan needs field m");
    const double m = doc.at("m").get<double>();
    const std::size_t grid =
        doc.contains("grid_points") ? doc.at("grid_points").get<std::size_t>() : 41;
    const auto points = symmetry_breaking_scan(m, grid);
    std::ostringstream csv;
    csv << "m_minus,L\n";
    char buf[80];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", p.m_minus, p.L);
        csv << buf;
    }
    w.emit("csv", csv.str());
    double interior_max = -1e300;
    for (std::size_t i = 1; i + 1 < points.size(); ++i)
        interior_max = std::max(interior_max, points[i].L);
    std::ostringstream os;
    os << "symmetry-scan: m=" << fmt(m) << " points=" << points.size()
       << " endpoints=" << fmt(points.front().L) << "," << fmt(points.back().L)
       << " interior_max=" << fmt(interior_max);
    return os.str();
}

std::string run_simulate(const json& doc, const Writer& w, bool, std::string& extra) {
    SimConfig config;
    if (doc.contains("N")) config.N = doc.at("N").get<int>();
    if (doc.contains("T")) config.T = doc.at("T").get<double>();
    if (doc.contains("alpha")) config.alpha = doc.at("alpha").get<double>();
    if (doc.contains("dx")) config.dx = doc.at("dx").get<double>();
    if (doc.contains("dt")) config.dt = doc.at("dt").get<double>();
    if (doc.contains("x_window")) config.x_window = doc.at("x_window").get<double>();
    if (doc.contains("samples")) config.samples = doc.at("samples").get<int>();
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("zero_noise")) config.zero_noise = doc.at("zero_noise").get<bool>();
    if (doc.contains("output_times"))
        config.output_times = doc.at("output_times").get<std::vector<double>>();
    config.validate();

    const FieldSample sample = simulate_she(config, 0);
    w.emit("field_csv", field_to_csv(sample));
    w.emit_bytes("field_bin", field_to_binary(sample));

    std::ostringstream os;
    os << "simulate: cells=" << sample.xs.size() << " rows=" << sample.times.size()
       << " positivity_violations=" << sample.positivity_violations;

    if (doc.contains("probes")) {
        std::vector<std::pair<double, double>> probes;
        for (const auto& jp : doc.at("probes")) {
            if (jp.is_array() && jp.size() == 2)
                probes.emplace_back(jp.at(0).get<double>(), jp.at(1).get<double>());
            else if (jp.is_object() && jp.contains("t") && jp.contains("x"))
                probes.emplace_back(jp.at("t").get<double>(), jp.at("x").get<double>());
            else
                throw DomainError("scenario: each probe must be [t, x] or {\"t\":..,\"x\":..}");
        }
        const double tol =
            doc.contains("hydro_tolerance") ? doc.at("hydro_tolerance").get<double>() : 0.1;
        const HydroReport report = hydrodynamic_check(config, probes, tol);
        w.emit("hydro_json", hydro_report_to_json(report));
        os << " hydro=" << (report.pass ? "pass" : "fail");
        std::ostringstream vs;
        for (const auto& p : report.probes)
            vs << "  probe(t=" << fmt(p.t) << ", x=" << fmt(p.x) << "): mean="
               << fmt(p.mean) << " parabola=" << fmt(p.parabola)
               << " |dev|=" << fmt(p.deviation) << "\n";
        extra = vs.str();
    }
    return os.str();
}

} // namespace

ScenarioReport run_scenario_text(const std::string& text, const std::string& out_dir,
                                 bool verbose) {
    const json doc = parse_document(text);
    if (!doc.is_object() || !doc.contains("kind"))
        throw DomainError("scenario: top-level object with a \"kind\" field required");
    ScenarioReport report;
    report.kind = doc.at("kind").get<std::string>();

    const json* outputs = doc.contains("outputs") ? &doc.at("outputs") : nullptr;
    Writer writer{fs::path(out_dir), outputs, &report.written};
    if (outputs != nullptr)
        fs::create_directories(writer.dir);

    std::string extra;
    if (report.kind == "rate")
        report.summary = run_rate(doc, writer, verbose, extra);
    else if (report.kind == "dual")
        report.summary = run_dual(doc, writer, verbose, extra);
    else if (report.kind == "shape")
        report.summary = run_shape(doc, writer, verbose, extra);
    else if (report.kind == "tree-check")
        report.summary = run_tree_check(doc, writer, verbose, extra);
    else if (report.kind == "symmetry-scan")
        report.summary = run_symmetry_scan(doc, writer, verbose, extra);
    else if (report.kind == "simulate")
        report.summary = run_simulate(doc, writer, verbose, extra);
    else
        throw DomainError("scenario: unknown kind \"" + report.kind + "\"");
    if (verbose && !extra.empty())
        report.summary += "\n" + extra;
    return report;
}

ScenarioReport run_scenario_file(const std::string& path, const std::string& out_dir,
                                 bool verbose) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw DomainError("scenario: cannot read file " + path);
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return run_scenario_text(buffer.str(), out_dir, verbose);
}

void render_shape_file(const std::string& shape_path, const std::string& out_path,
                       const std::vector<double>& window, int fan) {
    if (window.size() != 4)
        throw DomainError("render: window must be t0,t1,x0,x1");
    std::ifstream is(shape_path, std::ios::binary);
    if (!is)
        throw DomainError("render: cannot read file " + shape_path);
    std::ostringstream buffer;
    buffer << is.rdbuf();
    const json doc = parse_document(buffer.str());

    ProbeConfig config;
    if (doc.contains("config"))
        config = config_from(doc.at("config"));
    else
        config = config_from(doc);

    RenderOptions opt;
    opt.t0 = window[0];
    opt.t1 = window[1];
    opt.x0 = window[2];
    opt.x1 = window[3];
    opt.characteristic_fan = fan;
    const std::string svg = render_svg(build_limit_shape(config), opt);

    const fs::path out(out_path);
    if (out.has_parent_path())
        fs::create_directories(out.parent_path());
    std::ofstream os(out, std::ios::binary);
    if (!os)
        throw NumericError("render: cannot open output file " + out_path);
    os << svg;
}

} // namespace kpz
