#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kpz/errors.hpp"

namespace kpz {

// Desk-scale stochastic heat equation run
//   dZ = (1/2) Z'' dt + Z dW,   Z(0,.) = indicator of [-a NT, a NT],
// on a symmetric Dirichlet window, explicit Euler with multiplicative
// Ito noise.  Scaled coordinates: t_scaled = t/T, x_scaled = x/(NT),
// h = log(Z) / (N^2 T)   (indicator data needs no log-normalization).
struct SimConfig {
    int N = 8;
    double T = 1.0;
    double alpha = 0.05;   // strip half-width = alpha * N * T
    double dx = 0.05;
    double dt = 0.001;     // stability requires dt <= dx^2 / 2
    double x_window = 12.0; // half-width of the unscaled grid
    int samples = 1;
    std::uint64_t seed = 0;
    bool zero_noise = false;
    std::vector<double> output_times = {1.0}; // scaled, ascending

    void validate() const;
};

// Recorded field of one sample: rows at the requested output times.
struct FieldSample {
    SimConfig config;
    int sample_index = 0;
    std::vector<double> xs;                 // unscaled grid positions
    std::vector<double> times;              // scaled times actually recorded
    std::vector<std::vector<double>> Z;     // one row per recorded time
    long positivity_violations = 0;         // steps on which min Z < 0
};

// Continuum heat kernel (2 pi t)^{-1/2} exp(-x^2/(2t)).
double heat_kernel(double t, double x);

// Exact zero-noise solution at time t: the heat kernel smeared over the
// initial strip of the given half-width.
double strip_heat_solution(double t, double x, double half_width);

FieldSample simulate_she(const SimConfig& config, int sample_index = 0);

// Scaled height at scaled coordinates (t, x): nearest recorded row in
// time, linear interpolation in x.  Throws NumericError when the field
// is non-positive at the query.
double scaled_height(const FieldSample& sample, double t, double x);

struct HydroProbe {
    double t = 1.0;
    double x = 0.0;
    double mean = 0.0;      // sample mean of the scaled height
    double stddev = 0.0;
    double parabola = 0.0;  // hydrodynamic prediction -x^2/(2t)
    double deviation = 0.0; // |mean - parabola|
};

struct HydroReport {
    std::vector<HydroProbe> probes;
    double tolerance = 0.1;
    bool pass = false;
};

// Runs config.samples independent simulations (over the thread budget)
// and compares the mean scaled height at each (t,x) probe against the
// parabola.
HydroReport hydrodynamic_check(const SimConfig& config,
                               const std::vector<std::pair<double, double>>& probes,
                               double tolerance = 0.1);

// Field export: CSV rows t,x,Z,h in scaled coordinates, and a binary
// dump ("KPZF" magic, JSON header, row-major float64 field).
std::string field_to_csv(const FieldSample& sample);
std::vector<char> field_to_binary(const FieldSample& sample);
FieldSample field_from_binary(const std::vector<char>& bytes);
std::string hydro_report_to_json(const HydroReport& report);

} // namespace kpz
