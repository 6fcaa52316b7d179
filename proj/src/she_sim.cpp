#include "kpz/she_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kpz/philox.hpp"
#include "kpz/threading.hpp"

namespace kpz {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double erf_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
} // namespace

void SimConfig::validate() const {
    if (N < 1)
        throw DomainError("SimConfig: N must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T))
        throw DomainError("SimConfig: T must be positive");
    if (!(alpha > 0.0))
        throw DomainError("SimConfig: alpha must be positive");
    if (!(dx > 0.0) || !(dt > 0.0))
        throw DomainError("SimConfig: dx and dt must be positive");
    if (dt > 0.5 * dx * dx)
        throw DomainError("SimConfig: stability violation, dt=" + std::to_string(dt) +
                          " exceeds dx^2/2=" + std::to_string(0.5 * dx * dx));
    if (!(x_window > alpha * N * T))
        throw DomainError("SimConfig: x_window must exceed the initial strip half-width " +
                          std::to_string(alpha * N * T));
    if (samples < 1)
        throw DomainError("SimConfig: samples must be >= 1");
    if (output_times.empty())
        throw DomainError("SimConfig: needs at least one output time");
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (!(output_times[i] > 0.0) || !std::isfinite(output_times[i]))
            throw DomainError("SimConfig: output times must be positive");
        if (output_times[i] > 1.0 + 1e-12)
            throw DomainError("SimConfig: output times are scaled by T and capped at 1");
        if (i > 0 && output_times[i] <= output_times[i - 1])
            throw DomainError("SimConfig: output times must be strictly increasing");
    }
}

double heat_kernel(double t, double x) {
    if (!(t > 0.0))
        throw DomainError("heat_kernel: t must be positive");
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(kTwoPi * t);
}

double strip_heat_solution(double t, double x, double half_width) {
    if (!(t > 0.0))
        throw DomainError("strip_heat_solution: t must be positive");
    const double r = std::sqrt(t);
    return erf_cdf((x + half_width) / r) - erf_cdf((x - half_width) / r);
}

FieldSample simulate_she(const SimConfig& config, int sample_index) {
    config.validate();
    FieldSample out;
    out.config = config;
    out.sample_index = sample_index;

    const long half = std::lround(config.x_window / config.dx);
    const std::size_t cells = static_cast<std::size_t>(2 * half + 1);
    out.xs.resize(cells);
    for (std::size_t i = 0; i < cells; ++i)
        out.xs[i] = (static_cast<long>(i) - half) * config.dx;

    // initial condition: cell-overlap fraction of the indicator of
    // [-w, w], so the discrete mass matches the strip exactly
    const double w = config.alpha * config.N * config.T;
    std::vector<double> Z(cells, 0.0);
    for (std::size_t i = 1; i + 1 < cells; ++i) {
        const double a = out.xs[i] - 0.5 * config.dx;
        const double b = out.xs[i] + 0.5 * config.dx;
        const double overlap = std::min(b, w) - std::max(a, -w);
        if (overlap > 0.0)
            Z[i] = overlap / config.dx;
    }

    std::vector<long> record_step;
    for (double ts : config.output_times) {
        const long k = std::lround(ts * config.T / config.dt);
        if (k < 1)
            throw DomainError("simulate_she: output time " + std::to_string(ts) +
                              " is below one time step");
        record_step.push_back(k);
    }
    const long last_step = record_step.back();

    const double lam = 0.5 * config.dt / (config.dx * config.dx);
    const double noise_amp = std::sqrt(config.dt / config.dx);
    const std::uint64_t pairs = (cells + 1) / 2;
    const std::uint64_t stream =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(sample_index)) << 1) | 1u;

    std::vector<double> Zn(cells, 0.0);
    std::size_t next_record = 0;
    for (long k = 1; k <= last_step; ++k) {
        // explicit Euler, Ito noise evaluated on the pre-step field
        for (std::size_t i = 1; i + 1 < cells; ++i)
            Zn[i] = Z[i] + lam * (Z[i + 1] - 2.0 * Z[i] + Z[i - 1]);
        if (!config.zero_noise) {
            const std::uint64_t base = static_cast<std::uint64_t>(k - 1) * pairs;
            for (std::uint64_t p = 0; p < pairs; ++p) {
                double g0, g1;
                philox_normal_pair(config.seed, stream, base + p, g0, g1);
                const std::size_t i0 = static_cast<std::size_t>(2 * p);
                const std::size_t i1 = i0 + 1;
                if (i0 > 0 && i0 + 1 < cells)
                    Zn[i0] += Z[i0] * noise_amp * g0;
                if (i1 > 0 && i1 + 1 < cells)
                    Zn[i1] += Z[i1] * noise_amp * g1;
            }
        }
        Zn.front() = 0.0; // absorbing window edges
        Zn.back() = 0.0;
        Z.swap(Zn);

        double zmin = Z[1], zmax = Z[1];
        for (std::size_t i = 1; i + 1 < cells; ++i) {
            zmin = std::min(zmin, Z[i]);
            zmax = std::max(zmax, Z[i]);
        }
        if (!std::isfinite(zmax) || !std::isfinite(zmin)) {
            std::size_t bad = 0;
            for (std::size_t i = 0; i < cells; ++i)
                if (!std::isfinite(Z[i])) {
                    bad = i;
                    break;
                }
            throw NumericError("simulate_she: non-finite field at step " + std::to_string(k) +
                               ", cell " + std::to_string(bad) + " (x=" +
                               std::to_string(out.xs[bad]) + ")");
        }
        if (zmin < 0.0)
            ++out.positivity_violations;

        if (next_record < record_step.size() && k == record_step[next_record]) {
            out.times.push_back(static_cast<double>(k) * config.dt / config.T);
            out.Z.push_back(Z);
            ++next_record;
        }
    }
    return out;
}

double scaled_height(const FieldSample& sample, double t, double x) {
    const SimConfig& cfg = sample.config;
    if (sample.times.empty())
        throw DomainError("scaled_height: sample has no recorded rows");
    std::size_t row = 0;
    double best = std::fabs(sample.times[0] - t);
    for (std::size_t r = 1; r < sample.times.size(); ++r) {
        const double d = std::fabs(sample.times[r] - t);
        if (d < best) {
            best = d;
            row = r;
        }
    }
    if (best > 0.5 * cfg.dt / cfg.T + 1e-12)
        throw DomainError("scaled_height: no recorded row near scaled time " +
                          std::to_string(t));

    const double y = x * cfg.N * cfg.T; // unscaled position
    const double pos = (y + cfg.x_window) / cfg.dx;
    if (pos < 0.0 || pos > static_cast<double>(sample.xs.size() - 1))
        throw DomainError("scaled_height: probe x=" + std::to_string(x) +
                          " outside the simulation window");
    const std::size_t i0 = std::min(static_cast<std::size_t>(pos), sample.xs.size() - 2);
    const double frac = pos - static_cast<double>(i0);
    const double z =
        (1.0 - frac) * sample.Z[row][i0] + frac * sample.Z[row][i0 + 1];
    if (!(z > 0.0))
        throw NumericError("scaled_height: field is non-positive (" + std::to_string(z) +
                           ") at t=" + std::to_string(t) + ", x=" + std::to_string(x));
    const double nn = static_cast<double>(cfg.N);
    return std::log(z) / (nn * nn * cfg.T);
}

HydroReport hydrodynamic_check(const SimConfig& config,
                               const std::vector<std::pair<double, double>>& probes,
                               double tolerance) {
    if (probes.empty())
        throw DomainError("hydrodynamic_check: needs at least one probe");
    SimConfig run = config;
    std::vector<double> times = config.output_times;
    for (const auto& [pt, px] : probes)
        times.push_back(pt);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    run.output_times = times;
    run.validate();

    // per-sample heights, filled in parallel, reduced afterwards
    std::vector<std::vector<double>> vals(
        probes.size(), std::vector<double>(static_cast<std::size_t>(run.samples), 0.0));
    parallel_for(static_cast<std::size_t>(run.samples), [&](std::size_t s) {
        const FieldSample sample = simulate_she(run, static_cast<int>(s));
        for (std::size_t p = 0; p < probes.size(); ++p)
            vals[p][s] = scaled_height(sample, probes[p].first, probes[p].second);
    });

    HydroReport report;
    report.tolerance = tolerance;
    report.pass = true;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        HydroProbe hp;
        hp.t = probes[p].first;
        hp.x = probes[p].second;
        double mean = 0.0;
        for (double v : vals[p])
            mean += v;
        mean /= static_cast<double>(run.samples);
        double var = 0.0;
        for (double v : vals[p])
            var += (v - mean) * (v - mean);
        hp.mean = mean;
        hp.stddev = run.samples > 1
                        ? std::sqrt(var / static_cast<double>(run.samples - 1))
                        : 0.0;
        hp.parabola = -hp.x * hp.x / (2.0 * hp.t);
        hp.deviation = std::fabs(hp.mean - hp.parabola);
        if (hp.deviation >= tolerance)
            report.pass = false;
        report.probes.push_back(hp);
    }
    return report;
}

std::string field_to_csv(const FieldSample& sample) {
    const SimConfig& cfg = sample.config;
    const double scale = cfg.N * cfg.T;
    const double hnorm = static_cast<double>(cfg.N) * cfg.N * cfg.T;
    std::ostringstream os;
    os << "t,x,Z,h\n";
    char buf[160];
    for (std::size_t r = 0; r < sample.times.size(); ++r) {
        for (std::size_t i = 0; i < sample.xs.size(); ++i) {
            const double z = sample.Z[r][i];
            const double h = z > 0.0 ? std::log(z) / hnorm
                                     : std::numeric_limits<double>::quiet_NaN();
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n",
                          sample.times[r], sample.xs[i] / scale, z, h);
            os << buf;
        }
    }
    return os.str();
}

std::vector<char> field_to_binary(const FieldSample& sample) {
    nlohmann::json header;
    header["rows"] = sample.times.size();
    header["cols"] = sample.xs.size();
    header["times"] = sample.times;
    header["x0"] = sample.xs.empty() ? 0.0 : sample.xs.front();
    header["dx"] = sample.config.dx;
    header["sample_index"] = sample.sample_index;
    header["positivity_violations"] = sample.positivity_violations;
    header["config"] = {{"N", sample.config.N},
                        {"T", sample.config.T},
                        {"alpha", sample.config.alpha},
                        {"dx", sample.config.dx},
                        {"dt", sample.config.dt},
                        {"x_window", sample.config.x_window},
                        {"samples", sample.config.samples},
                        {"seed", sample.config.seed},
                        {"zero_noise", sample.config.zero_noise},
                        {"output_times", sample.config.output_times}};
    const std::string head = header.dump();

    std::vector<char> bytes;
    const std::uint32_t hlen = static_cast<std::uint32_t>(head.size());
    bytes.insert(bytes.end(), {'K', 'P', 'Z', 'F'});
    for (int b = 0; b < 4; ++b)
        bytes.push_back(static_cast<char>((hlen >> (8 * b)) & 0xFF));
    bytes.insert(bytes.end(), head.begin(), head.end());
    for (const auto& row : sample.Z) {
        const char* raw = reinterpret_cast<const char*>(row.data());
        bytes.insert(bytes.end(), raw, raw + row.size() * sizeof(double));
    }
    return bytes;
}

FieldSample field_from_binary(const std::vector<char>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), "KPZF", 4) != 0)
        throw DomainError("field_from_binary: missing KPZF magic");
    std::uint32_t hlen = 0;
    for (int b = 0; b < 4; ++b)
        hlen |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 + b])) << (8 * b);
    if (bytes.size() < 8 + hlen)
        throw DomainError("field_from_binary: truncated header");
    const nlohmann::json header =
        nlohmann::json::parse(bytes.begin() + 8, bytes.begin() + 8 + hlen);

    FieldSample sample;
    const auto& jc = header.at("config");
    sample.config.N = jc.at("N").get<int>();
    sample.config.T = jc.at("T").get<double>();
    sample.config.alpha = jc.at("alpha").get<double>();
    sample.config.dx = jc.at("dx").get<double>();
    sample.config.dt = jc.at("dt").get<double>();
    sample.config.x_window = jc.at("x_window").get<double>();
    sample.config.samples = jc.at("samples").get<int>();
    sample.config.seed = jc.at("seed").get<std::uint64_t>();
    sample.config.zero_noise = jc.at("zero_noise").get<bool>();
    sample.config.output_times = jc.at("output_times").get<std::vector<double>>();
    sample.sample_index = header.at("sample_index").get<int>();
    sample.positivity_violations = header.at("positivity_violations").get<long>();
    sample.times = header.at("times").get<std::vector<double>>();

    const std::size_t rows = header.at("rows").get<std::size_t>();
    const std::size_t cols = header.at("cols").get<std::size_t>();
    // rebuild the grid with the writer's arithmetic so the round trip
    // is bitwise exact: xs[i] = (i - half) * dx with half = cols / 2
    const long half = static_cast<long>(cols / 2);
    sample.xs.resize(cols);
    for (std::size_t i = 0; i < cols; ++i)
        sample.xs[i] = (static_cast<long>(i) - half) * sample.config.dx;
    if (bytes.size() != 8 + hlen + rows * cols * sizeof(double))
        throw DomainError("field_from_binary: payload size mismatch");
    sample.Z.assign(rows, std::vector<double>(cols, 0.0));
    const char* cursor = bytes.data() + 8 + hlen;
    for (std::size_t r = 0; r < rows; ++r) {
        std::memcpy(sample.Z[r].data(), cursor, cols * sizeof(double));
        cursor += cols * sizeof(double);
    }
    return sample;
}

std::string hydro_report_to_json(const HydroReport& report) {
    nlohmann::json doc;
    doc["tolerance"] = report.tolerance;
    doc["pass"] = report.pass;
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& p : report.probes)
        probes.push_back({{"t", p.t},
                          {"x", p.x},
                          {"mean", p.mean},
                          {"stddev", p.stddev},
                          {"parabola", p.parabola},
                          {"deviation", p.deviation}});
    doc["probes"] = probes;
    return doc.dump(2);
}

} // namespace kpz
