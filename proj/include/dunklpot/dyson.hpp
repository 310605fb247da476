/** @file dyson.hpp
 *  @brief Monte Carlo exit law of the chamber diffusion with generator
 *  (1/2) Delta + b.grad, b = sum over positive roots of k(alpha) alpha / <alpha, x>
 *  (= grad log pi at k = 1),
 *  compared against the Poisson density on the sphere.
 *
 *  The Poisson kernel is harmonic for Delta + 2 b.grad (the drift summed over all
 *  roots); halving the generator leaves the exit law unchanged, so each step is
 *  X + b h + sqrt(h) N(0, I). */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dunklpot/kernels.hpp"
#include "dunklpot/serialization.hpp"

namespace dunklpot {

struct SdeConfig {
    double h0 = 1e-3;
    double c_w = 0.05;  ///< h <= c_w min_alpha <alpha, X>^2
    double c_b = 0.05;  ///< h <= c_b (1 - |X|)^2 inside the exit shell approach
    std::uint64_t max_steps = 10'000'000;
    int max_halvings = 10;
    double delta_exit = 1e-4;
    std::uint64_t seed = 1;
    void validate() const;
};

Vec drift(const RootSystem& rs, const Vec& x);

struct ExitResult {
    bool rejected = false;
    Vec y;  ///< exit point on the sphere
    std::uint64_t steps = 0;
    std::uint64_t retries = 0;
    std::string reason;
};

/// One path; its random stream is (cfg.seed, path).
ExitResult simulate_exit(const RootSystem& rs, const Vec& x0, const SdeConfig& cfg, std::uint64_t path = 0);

/// Equal-area bins on the chamber's part of the sphere: arcs in R^2, and in R^3
/// a (height, azimuth) grid around an axis orthogonal to every root.
struct ExitBins {
    int dim = 0;
    int n_height = 1, n_angle = 0;
    Vec u1, u2, axis;
    double angle = 0;  ///< opening angle of the chamber around the axis
    int count() const { return n_height * n_angle; }
    int bin_of(const Vec& y) const;
    /// Point at height z (ignored for dim 2) and azimuth t.
    Vec point(double z, double t) const;
};

ExitBins make_exit_bins(const RootSystem& rs, int bins);

/// Integral of P(x0, y) pi(y)^2 over each bin.
std::vector<double> predicted_bin_masses(const RootSystem& rs, const Vec& x0, const ExitBins& b, int nodes = 8);

struct ExitHistogram {
    std::string system_id;
    Vec x0;
    SdeConfig config;
    int bins = 0;
    std::vector<std::size_t> counts;
    std::size_t total_paths = 0, rejected = 0;
    std::vector<double> empirical, predicted;
    double predicted_mass = 0;  ///< sum of the raw predicted masses, before normalization
    double tv_distance = 0;
    double chi_square = 0;
    int degrees_of_freedom = 0;
    double mean_steps = 0;
    double rejected_fraction() const { return total_paths ? double(rejected) / total_paths : 0; }
};

ExitHistogram exit_law_test(const RootSystem& rs, const Vec& x0, std::size_t n_paths, int bins, const SdeConfig& cfg,
                            int threads = 1);

json histogram_to_json(const ExitHistogram& h);

}  // namespace dunklpot
