/** @file kernels.hpp
 *  @brief W-invariant Poisson and Newton kernels of the complex case, evaluated
 *  from the alternating sums with a certified relative error, plus the
 *  comparison estimators. */
#pragma once

#include <cstddef>
#include <utility>

#include "dunklpot/root_system.hpp"

namespace dunklpot {

struct PrecisionPolicy {
    double target_rel_err = 1e-10;
    int max_bits = 4096;
};

struct Normalization {
    /// Surface measure of the unit sphere; 0 selects 2 pi^{d/2} / Gamma(d/2).
    double sphere_area = 0;
};

struct KernelQuery {
    const RootSystem* system = nullptr;
    Vec x;
    Vec y;
    PrecisionPolicy policy{};
    Normalization normalization{};
};

struct KernelValue {
    double value = 0;
    double achieved_relative_error = 0;
    int precision_bits_used = 53;
    double cancellation_ratio = 1;
};

enum class EstimatorVariant { Reflected, Phi };
enum class KernelType { Poisson, Newton };

double sphere_area(int d);
double sphere_area(const RootSystem& rs, const Normalization& n);
/// pi(2 rho) = prod over positive roots of <alpha, sum_beta k(beta) beta>.
double pi_two_rho(const RootSystem& rs);

KernelValue poisson_complex(const KernelQuery& q);
KernelValue newton_complex(const KernelQuery& q);

/// P^W(x, y) pi(y)^2 for |y| = 1, with no division by pi(y); usable on walls of y.
KernelValue poisson_density(const KernelQuery& q);

/// Closed form of the Poisson kernel at x = 0 (independent of y on the sphere).
double poisson_at_origin(const RootSystem& rs, const Normalization& n = {});
double newton_at_origin(const RootSystem& rs, const Vec& x);
double heat_at_origin(const RootSystem& rs, double t, const Vec& x);

/// Rank one and rank two plane formulas for the d = 2 Newton kernel written through
/// psi(g1, g2) = 2 g1(x) g2(y) / |x-y|^2; evaluated at fixed extended precision.
double newton_plane_psi(const RootSystem& rs, const Vec& x, const Vec& y, int bits = 256);
double psi(const RootSystem& rs, std::size_t g1, std::size_t g2, const Vec& x, const Vec& y);

/// |x - sigma_alpha y| through the reflection identity (no cancellation).
double reflected_distance(const RootSystem& rs, std::size_t pos, const Vec& x, const Vec& y);
double phi_alpha(const RootSystem& rs, std::size_t pos, const Vec& x, const Vec& y);
double omega_poisson(const RootSystem& rs, const Vec& x, const Vec& y,
                     EstimatorVariant v = EstimatorVariant::Reflected);
double omega_newton(const RootSystem& rs, const Vec& x, const Vec& y,
                    EstimatorVariant v = EstimatorVariant::Reflected);

struct FramingBounds {
    double lower = 0;
    double upper = 0;
};
FramingBounds framing_bounds(const RootSystem& rs, const Vec& x, const Vec& y);

/// (1/|x-y|^d - 1/|x-sigma y|^d) / (alpha(x) alpha(y)) in factored form.
double rank1_ratio_oracle(int d, const Vec& x, const Vec& y, const Vec& alpha);

}  // namespace dunklpot
