#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "kpz/philox.hpp"
#include "kpz/she_sim.hpp"
#include "kpz/threading.hpp"

using namespace kpz;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    const auto zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const std::uint32_t ff = 0xffffffffu;
    const auto ones = Philox4x32::block({ff, ff, ff, ff}, {ff, ff});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const auto pi = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                      {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("normal pairs are deterministic in (seed, stream, index)") {
    double a0, a1, b0, b1;
    philox_normal_pair(42u, 7u, 1234u, a0, a1);
    philox_normal_pair(42u, 7u, 1234u, b0, b1);
    CHECK(a0 == b0);
    CHECK(a1 == b1);
    philox_normal_pair(42u, 7u, 1235u, b0, b1);
    CHECK(a0 != b0);
    philox_normal_pair(43u, 7u, 1234u, b0, b1);
    CHECK(a0 != b0);
}

TEST_CASE("normal pairs have standard moments") {
    double sum = 0.0, sumsq = 0.0;
    const long n = 200000;
    for (long i = 0; i < n; ++i) {
        double g0, g1;
        philox_normal_pair(2026u, 1u, static_cast<std::uint64_t>(i), g0, g1);
        sum += g0 + g1;
        sumsq += g0 * g0 + g1 * g1;
    }
    const double mean = sum / (2.0 * n);
    const double var = sumsq / (2.0 * n) - mean * mean;
    CHECK(std::fabs(mean) < 0.005);
    CHECK(std::fabs(var - 1.0) < 0.01);
}

TEST_CASE("configuration validation") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    SimConfig bad = c;
    bad.dt = bad.dx * bad.dx; // above the stability bound dx^2/2
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.x_window = 0.1; // window must contain the initial strip
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.N = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.samples = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.output_times = {0.8, 0.4}; // must ascend
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.output_times = {1.4}; // beyond the horizon
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("zero-noise run reproduces the smeared heat kernel") {
    SimConfig c;
    c.zero_noise = true;
    const FieldSample field = simulate_she(c);
    const double w = c.alpha * c.N * c.T; // 0.4
    const double reach = w + 4.0 * std::sqrt(c.T);
    REQUIRE(field.times.back() == doctest::Approx(1.0));
    const std::vector<double>& row = field.Z.back();
    for (std::size_t i = 0; i < field.xs.size(); ++i) {
        const double y = field.xs[i];
        if (std::fabs(y) > reach)
            continue;
        const double exact = strip_heat_solution(c.T, y, w);
        CHECK(std::fabs(row[i] - exact) <= 0.02 * exact);
    }
    CHECK(field.positivity_violations == 0);
}

TEST_CASE("strip heat solution reduces to normal CDF differences") {
    const double w = 0.4;
    auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    for (double y : {-2.0, -0.3, 0.0, 0.9, 3.1}) {
        const double want = Phi(y + w) - Phi(y - w); // T = 1
        CHECK(strip_heat_solution(1.0, y, w) == doctest::Approx(want).epsilon(1e-12));
    }
    // mass conservation: integrates to the strip width
    double mass = 0.0;
    for (double y = -8.0; y <= 8.0; y += 0.01)
        mass += strip_heat_solution(1.0, y, w) * 0.01;
    CHECK(mass == doctest::Approx(2.0 * w).epsilon(1e-4));
}

TEST_CASE("noisy runs are bitwise reproducible by seed") {
    SimConfig c;
    c.samples = 1;
    c.seed = 99u;
    c.output_times = {0.5, 1.0};
    const FieldSample a = simulate_she(c, 0);
    const FieldSample b = simulate_she(c, 0);
    REQUIRE(a.Z.size() == b.Z.size());
    for (std::size_t r = 0; r < a.Z.size(); ++r)
        CHECK(a.Z[r] == b.Z[r]);
    // a different sample index decorrelates the field
    const FieldSample other = simulate_she(c, 1);
    CHECK(a.Z.back() != other.Z.back());
    CHECK(a.positivity_violations == 0);
}

TEST_CASE("thread budget does not change the ensemble statistics") {
    SimConfig c;
    c.samples = 6;
    c.seed = 31415u;
    const std::vector<std::pair<double, double>> probes = {{1.0, 0.0}, {1.0, 1.0}};

    setenv("KPZLDP_THREADS", "1", 1);
    const HydroReport serial = hydrodynamic_check(c, probes, 0.1);
    setenv("KPZLDP_THREADS", "3", 1);
    const HydroReport threaded = hydrodynamic_check(c, probes, 0.1);
    unsetenv("KPZLDP_THREADS");

    REQUIRE(serial.probes.size() == threaded.probes.size());
    for (std::size_t i = 0; i < serial.probes.size(); ++i) {
        CHECK(serial.probes[i].mean == threaded.probes[i].mean);
        CHECK(serial.probes[i].stddev == threaded.probes[i].stddev);
    }
}

TEST_CASE("hydrodynamic probes sit near the parabola") {
    SimConfig c;
    c.samples = 24;
    c.seed = 7u;
    const HydroReport report = hydrodynamic_check(c, {{1.0, 0.0}, {1.0, 1.0}}, 0.1);
    REQUIRE(report.probes.size() == 2);
    CHECK(report.probes[0].parabola == 0.0);
    CHECK(report.probes[1].parabola == doctest::Approx(-0.5));
    for (const HydroProbe& p : report.probes)
        CHECK(p.deviation < 0.1);
    CHECK(report.pass);
}

TEST_CASE("scaled height matches the field logarithm") {
    SimConfig c;
    c.zero_noise = true;
    const FieldSample field = simulate_she(c);
    const double scale = static_cast<double>(c.N) * c.N * c.T;
    // x = 0.025 scaled -> y = 0.2 unscaled, exactly on the grid
    const double y = 0.2;
    std::size_t idx = 0;
    while (field.xs[idx] < y - 1e-12)
        ++idx;
    const double want = std::log(field.Z.back()[idx]) / scale;
    CHECK(scaled_height(field, 1.0, y / (c.N * c.T)) == doctest::Approx(want).epsilon(1e-12));
    // the absorbing edge is non-positive: log must refuse
    CHECK_THROWS_AS(scaled_height(field, 1.0, c.x_window / (c.N * c.T)), NumericError);
}

TEST_CASE("binary field round trip is exact") {
    SimConfig c;
    c.samples = 1;
    c.seed = 5u;
    c.output_times = {0.25, 1.0};
    const FieldSample a = simulate_she(c, 0);
    const std::vector<char> bytes = field_to_binary(a);
    REQUIRE(bytes.size() > 4);
    CHECK(bytes[0] == 'K');
    CHECK(bytes[1] == 'P');
    CHECK(bytes[2] == 'Z');
    CHECK(bytes[3] == 'F');
    const FieldSample b = field_from_binary(bytes);
    CHECK(b.config.N == a.config.N);
    CHECK(b.config.dx == a.config.dx);
    CHECK(b.times == a.times);
    REQUIRE(b.Z.size() == a.Z.size());
    for (std::size_t r = 0; r < a.Z.size(); ++r)
        CHECK(b.Z[r] == a.Z[r]);
    CHECK(b.xs == a.xs);

    std::vector<char> corrupt = bytes;
    corrupt[0] = 'X';
    CHECK_THROWS_AS(field_from_binary(corrupt), DomainError);
}

TEST_CASE("CSV export carries the scaled header") {
    SimConfig c;
    c.zero_noise = true;
    c.output_times = {1.0};
    const std::string csv = field_to_csv(simulate_she(c));
    CHECK(csv.rfind("t,x,Z,h\n", 0) == 0);
    CHECK(csv.find("\n1,") != std::string::npos); // scaled terminal row
}
