/** @file product.hpp
 *  @brief Kernels of products of rank-one systems (A1 x ... x A1 or B1 x ... x B1)
 *  with arbitrary multiplicities, by nested Gauss-Jacobi quadrature of the
 *  intertwiner integral, and their closed-form two-sided estimates. */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dunklpot/kernels.hpp"

namespace dunklpot {

enum class ProductVariant { A1, B1 };

struct ProductSystem {
    int J = 1;
    std::vector<double> m;  ///< one multiplicity parameter per factor
    int d = 2;
    ProductVariant variant = ProductVariant::A1;

    /// Throws InvalidArgument unless the layout fits in R^d.
    void validate() const;
    /// Root of factor i: e_{2i} - e_{2i+1} (A1) or e_i (B1).
    Vec root(int i) const;
    double root_norm2() const { return variant == ProductVariant::A1 ? 2.0 : 1.0; }
    /// |alpha_i(x)|.
    double pairing(int i, const Vec& x) const;
    /// |x - sigma_i y|^2 - |x - y|^2 for chamber-ordered points.
    double shift(int i, const Vec& x, const Vec& y) const;
    Vec project_to_chamber(const Vec& x) const;
    std::string id() const;
};

struct QuadratureSpec {
    /// Gauss nodes per panel; each factor is split into graded panels around its
    /// near-singular end, and the rule is compared against one with twice the nodes.
    int nodes = 10;
    double target_rel_err = 1e-8;
    std::uint64_t max_evaluations = 10'000'000;
};

struct ProductConstants {
    /// 0 selects the default normalization of each kernel.
    double poisson = 0;
    double newton = 0;
};

struct ProductIntegral {
    double value = 0;       ///< with the finer rule
    double coarse = 0;      ///< with the base rule
    double rel_err = 0;     ///< |value - coarse| / value
    std::uint64_t evaluations = 0;
};

double default_product_constant(const ProductSystem& ps, KernelType k);

/// Raw integral of prod (v(1-v))^{m_i/2-1} (A + sum B_i v_i)^{-P} over the unit cube.
ProductIntegral product_cube_integral(double A, const std::vector<double>& B, const std::vector<double>& m, double P,
                                      const QuadratureSpec& quad = {});

ProductIntegral product_integral(const ProductSystem& ps, KernelType k, const Vec& x, const Vec& y,
                                 const QuadratureSpec& quad = {});

KernelValue product_poisson(const ProductSystem& ps, const Vec& x, const Vec& y, const QuadratureSpec& quad = {},
                            const ProductConstants& c = {});
KernelValue product_newton(const ProductSystem& ps, const Vec& x, const Vec& y, const QuadratureSpec& quad = {},
                           const ProductConstants& c = {});

double t_integral(double A, double B, double m, double M, const QuadratureSpec& quad = {});
double t_asymptotic(double A, double B, double m, double M);

double product_estimate_poisson(const ProductSystem& ps, const Vec& x, const Vec& y);
double product_estimate_newton(const ProductSystem& ps, const Vec& x, const Vec& y);

/// Root system with the same roots and multiplicities k_i = m_i / 2.
RootSystem product_root_system(const ProductSystem& ps);

enum class ProductStrategy { Uniform, WallStratified, NearDiagonal, Mixed };

struct ProductSample {
    Vec x, y;
    ProductStrategy strategy;
};

std::vector<ProductSample> product_sample_pairs(const ProductSystem& ps, KernelType k, ProductStrategy s,
                                                std::size_t n, std::uint64_t seed);

struct ProductRow {
    Vec x, y;
    double kernel = 0, kernel_coarse = 0, estimate = 0, ratio = 0;
    bool ok = true;
    std::string error;
};

struct ProductSweep {
    std::vector<ProductRow> rows;
    double min_ratio = 0, max_ratio = 0;
    double min_ratio_coarse = 0, max_ratio_coarse = 0;
    std::size_t failures = 0;
};

ProductSweep product_sweep(const ProductSystem& ps, KernelType k, const std::vector<ProductSample>& samples,
                           const QuadratureSpec& quad = {}, int threads = 1);

}  // namespace dunklpot
