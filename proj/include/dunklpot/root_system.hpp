/** @file root_system.hpp
 *  @brief Crystallographic root systems, Weyl groups and chamber geometry,
 *  all in exact rational arithmetic. */
#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "dunklpot/linalg.hpp"
#include "dunklpot/polynomial.hpp"

namespace dunklpot {

enum class Family { A, B, C, D, G2, Explicit, Trivial };

std::string family_name(Family f);

struct BuildOptions {
    std::size_t weyl_cap = 100000;
    /// Treat span(roots) as the whole space: the kernel dimension becomes the rank.
    bool span_only = false;
};

/// One element of W, stored as a d x d matrix in ambient coordinates.
struct WeylElement {
    std::size_t index = 0;
    RVec matrix;
    Vec matrix_f;
    int sign = 1;
    std::vector<int> word;
    /// Signed-permutation fast path: (w y)_k = perm_sign[k] * y[perm[k]].
    bool signed_permutation = false;
    std::vector<int> perm;
    std::vector<int> perm_sign;

    int length() const { return static_cast<int>(word.size()); }
    Vec apply(const Vec& y) const;
    RVec apply(const RVec& y) const;
};

/// a(y) = sum_j coeffs[j] * alpha_j(y), expressed in the simple-root basis.
struct LinearForm {
    RVec coeffs;
    bool is_zero() const;
};

class RootSystem {
public:
    Family family() const { return family_; }
    int rank() const { return rank_; }
    int ambient_dim() const { return dim_; }
    /// Dimension entering kernel exponents and sphere measures.
    int kernel_dim() const { return span_only_ ? rank_ : dim_; }
    bool span_only() const { return span_only_; }
    std::string id() const { return id_; }

    const std::vector<RVec>& simple_roots() const { return simple_; }
    const std::vector<RVec>& positive_roots() const { return positive_; }
    const std::vector<Vec>& positive_roots_f() const { return positive_f_; }
    /// Coefficients of each positive root in the simple basis.
    const std::vector<std::vector<long>>& positive_coefficients() const { return coeffs_; }
    const std::vector<Rational>& multiplicities() const { return mult_; }
    const std::vector<Rational>& norms2() const { return norm2_; }
    const std::vector<double>& norms() const { return norm_f_; }
    std::size_t num_positive_roots() const { return positive_.size(); }
    /// Root system of the simple roots with indices < rank().
    bool is_simple(std::size_t pos) const { return pos < static_cast<std::size_t>(rank_); }
    bool complex_case() const;
    std::vector<Rational> simple_multiplicities() const;

    Rational kappa() const { return kappa_; }
    const RVec& rho() const { return rho_; }
    int height_bound() const { return height_; }
    Rational K0() const { return K0_; }
    double C1() const { return C1_; }
    /// Dual basis of span(roots): <alpha_i, omega_j> = delta_ij.
    const std::vector<RVec>& fundamental_coweights() const { return coweights_; }

    const std::vector<WeylElement>& weyl() const { return *weyl_; }
    std::size_t weyl_order() const { return weyl_->size(); }
    /// Index of s_i * w.
    std::size_t left_simple(int i, std::size_t w) const { return mul_[i][w]; }
    /// Weyl element of the reflection in the positive root with index pos.
    std::size_t reflection_element(std::size_t pos) const { return refl_[pos]; }
    /// Index of the element with the given matrix, or npos.
    std::size_t find(const RVec& matrix) const;
    std::size_t compose(std::size_t a, std::size_t b) const;
    std::size_t inverse(std::size_t a) const;

    Vec reflect(std::size_t pos, const Vec& y) const;
    RVec reflect(std::size_t pos, const RVec& y) const;
    double pairing(std::size_t pos, const Vec& y) const;
    Rational pairing(std::size_t pos, const RVec& y) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    friend RootSystem build_root_system(Family, int, int, const BuildOptions&);
    friend RootSystem root_system_from_simple_roots(std::vector<RVec>, std::vector<Rational>,
                                                    const BuildOptions&);
    friend RootSystem trivial_root_system(int);
    static RootSystem assemble(Family fam, int dim, std::vector<RVec> simple, std::vector<Rational> kmult,
                               const BuildOptions& opt);

    Family family_ = Family::Explicit;
    int rank_ = 0;
    int dim_ = 0;
    bool span_only_ = false;
    std::string id_;
    std::vector<RVec> simple_;
    std::vector<RVec> positive_;
    std::vector<Vec> positive_f_;
    std::vector<std::vector<long>> coeffs_;
    std::vector<Rational> mult_;
    std::vector<Rational> norm2_;
    std::vector<double> norm_f_;
    Rational kappa_;
    RVec rho_;
    int height_ = 0;
    Rational K0_;
    double C1_ = 0;
    std::vector<RVec> coweights_;
    RVec regular_;
    std::shared_ptr<std::vector<WeylElement>> weyl_;
    std::vector<std::vector<std::size_t>> mul_;
    std::vector<std::size_t> refl_;
    std::shared_ptr<std::vector<std::pair<RVec, std::size_t>>> keys_;
};

/// Catalog constructor: A_n, B_n, C_n, D_n, G2 in standard coordinates.
RootSystem build_root_system(Family family, int rank, int ambient_dim, const BuildOptions& opt = {});
/// Root system generated by explicit simple roots; multiplicities per simple root (empty: all 1).
RootSystem root_system_from_simple_roots(std::vector<RVec> simple, std::vector<Rational> multiplicities = {},
                                         const BuildOptions& opt = {});
/// Empty root system in R^dim (plain Brownian motion, classical kernels).
RootSystem trivial_root_system(int dim);
/// Parses selectors like "a2", "a1:3", "a2:span", "b3", "g2", "trivial:3".
RootSystem parse_system(const std::string& selector, const BuildOptions& opt = {});
std::vector<std::string> catalog_selectors();

const std::vector<WeylElement>& enumerate_weyl(const RootSystem& rs);

struct ChamberProjection {
    Vec x_plus;
    std::size_t w = 0;
};
ChamberProjection project_to_chamber(const RootSystem& rs, const Vec& x);
struct ChamberProjectionExact {
    RVec x_plus;
    std::size_t w = 0;
};
ChamberProjectionExact project_to_chamber(const RootSystem& rs, const RVec& x);
bool in_closed_chamber(const RootSystem& rs, const Vec& x);

/// Forms a_i^w with y - w y = sum_i 2 a_i^w(y) / |alpha_i|^2 * alpha_i.
std::vector<LinearForm> decompose_orbit_difference(const RootSystem& rs, std::size_t w);
Rational evaluate(const RootSystem& rs, const LinearForm& a, const RVec& y);
/// Largest coefficient over all a_i^w, w in W.
long max_orbit_coeff(const RootSystem& rs);

Polynomial pi_polynomial(const RootSystem& rs);
double pi_value(const RootSystem& rs, const Vec& x);
Rational pi_value(const RootSystem& rs, const RVec& x);

struct BasicSubsystem {
    std::vector<int> simple;              ///< generating simple-root indices
    std::vector<std::size_t> positive;    ///< indices into positive_roots()
    std::vector<std::size_t> complement;  ///< remaining positive roots
    std::vector<std::size_t> subgroup;    ///< elements of W'
    std::vector<std::size_t> cosubgroup;  ///< W \ W'
    bool empty() const { return simple.empty(); }
};

BasicSubsystem basic_subsystem(const RootSystem& rs, std::vector<int> simple);
std::vector<BasicSubsystem> all_basic_subsystems(const RootSystem& rs);

/// Product over the subsystem's positive roots of directional derivatives, applied to its pi.
Rational pi_derivative_constant(const RootSystem& rs, const BasicSubsystem& sub);

/// alpha(y)/|alpha| for a closed-chamber point y.
double dist_to_wall(const RootSystem& rs, std::size_t pos, const Vec& y);

}  // namespace dunklpot
