#include "dunklpot/multiprecision.hpp"

namespace dunklpot::mp {

namespace {
thread_local int g_precision = 128;
}

int working_precision() { return g_precision; }

PrecisionScope::PrecisionScope(int bits) : saved_(g_precision) { g_precision = bits; }
PrecisionScope::~PrecisionScope() { g_precision = saved_; }

Real sqrt(const Real& a) {
    Real r;
    mpfr_sqrt(r.get(), a.get(), MPFR_RNDN);
    return r;
}

Real log(const Real& a) {
    Real r;
    mpfr_log(r.get(), a.get(), MPFR_RNDN);
    return r;
}

Real log1p(const Real& a) {
    Real r;
    mpfr_log1p(r.get(), a.get(), MPFR_RNDN);
    return r;
}

Real abs(const Real& a) {
    Real r;
    mpfr_abs(r.get(), a.get(), MPFR_RNDN);
    return r;
}

Real pow(const Real& a, long n) {
    Real r;
    mpfr_pow_si(r.get(), a.get(), n, MPFR_RNDN);
    return r;
}

Real pi() {
    Real r;
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}

}  // namespace dunklpot::mp
