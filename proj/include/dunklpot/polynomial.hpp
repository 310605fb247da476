/** @file polynomial.hpp
 *  @brief Sparse multivariate polynomials with exact rational coefficients. */
#pragma once

#include <map>
#include <string>
#include <vector>

#include "dunklpot/linalg.hpp"

namespace dunklpot {

class Polynomial {
public:
    using Exponent = std::vector<int>;

    explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

    static Polynomial constant(int nvars, const Rational& c);
    /// The linear form x -> <a, x>.
    static Polynomial linear(const RVec& a);

    int nvars() const { return nvars_; }
    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return degree() <= 0; }
    Rational constant_term() const;
    const std::map<Exponent, Rational>& terms() const { return terms_; }

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const Rational& c) const;
    bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

    Polynomial partial(int var) const;
    /// Directional derivative sum_i v_i d/dx_i.
    Polynomial derivative(const RVec& v) const;
    Polynomial laplacian() const;

    Rational operator()(const RVec& x) const;
    double operator()(const Vec& x) const;

    std::string str() const;

private:
    void add_term(const Exponent& e, const Rational& c);

    int nvars_;
    std::map<Exponent, Rational> terms_;
};

}  // namespace dunklpot
