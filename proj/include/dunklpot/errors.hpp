#pragma once

#include <stdexcept>
#include <string>

namespace dunklpot {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DUNKLPOT_ERROR(Name)                          \
    class Name : public Error {                       \
    public:                                           \
        explicit Name(const std::string& what)        \
            : Error(std::string(#Name ": ") + what) {} \
    }

DUNKLPOT_ERROR(InvalidArgument);
DUNKLPOT_ERROR(UnsupportedFamily);
DUNKLPOT_ERROR(EnumerationCapExceeded);
DUNKLPOT_ERROR(NonCrystallographic);
DUNKLPOT_ERROR(DecompositionFailed);
DUNKLPOT_ERROR(NotInChamber);
DUNKLPOT_ERROR(OnWall);
DUNKLPOT_ERROR(DegenerateWall);
DUNKLPOT_ERROR(QuadratureNotConverged);
DUNKLPOT_ERROR(UnsupportedRegime);
DUNKLPOT_ERROR(UnsupportedGeometry);
DUNKLPOT_ERROR(ClassificationFailed);
DUNKLPOT_ERROR(StrategyExhausted);

#undef DUNKLPOT_ERROR

class PrecisionExhausted : public Error {
public:
    explicit PrecisionExhausted(const std::string& what, double cancellation = 0)
        : Error("PrecisionExhausted: " + what), cancellation_ratio(cancellation) {}
    double cancellation_ratio;  ///< sum |t| / |sum t| at the last tier, 0 if unknown
};

}  // namespace dunklpot
