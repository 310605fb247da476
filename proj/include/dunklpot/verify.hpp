/** @file verify.hpp
 *  @brief Subregion classification, structured sampling and ratio sweeps that
 *  measure kernel / estimator envelopes. */
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dunklpot/kernels.hpp"
#include "dunklpot/serialization.hpp"

namespace dunklpot {

struct Subregion {
    BasicSubsystem sub;
    double c_prime = 0;
    int escalations = 0;  ///< times c was multiplied by N
    /// min over sub's roots of |x-y| - c' alpha(y); +inf when sub is empty.
    double slack_inner = 0;
    /// min over the complement of c' beta(y) - |x-y|; +inf when the complement is empty.
    double slack_outer = 0;
    std::string label() const;
};

/// min{1, 1/(4 C1), sqrt(K0/2) / (2|W|)^{1/d}}.
double default_classification_c(const RootSystem& rs);

Subregion classify_subregion(const RootSystem& rs, const Vec& x, const Vec& y, double c);

enum class SampleStrategy { Uniform, WallStratified, NearDiagonal, SubregionTargeted, Mixed };

const char* to_string(SampleStrategy s);
SampleStrategy parse_strategy(const std::string& s);
const char* to_string(KernelType k);
KernelType parse_kernel_type(const std::string& s);

struct SamplePair {
    Vec x, y;
    SampleStrategy strategy = SampleStrategy::Uniform;
    /// Wall-stratified: requested simple-root value and its index; subregion: target simple set.
    double requested = 0;
    int wall = -1;
    char near = 0;  ///< wall-stratified: 'x', 'y' or 'b' (both) were pinned
    std::vector<int> target;
};

struct SamplerOptions {
    double c = 0;  ///< classification constant for subregion targeting; 0 selects the default
    std::uint64_t max_rejections = 1'000'000;
};

std::vector<SamplePair> sample_pairs(const RootSystem& rs, KernelType k, SampleStrategy s, std::size_t n,
                                     std::uint64_t seed, const SamplerOptions& opt = {});

struct RatioStats {
    std::size_t count = 0;
    double min = 0, max = 0, geometric_mean = 0;
    std::array<double, 9> deciles{};
};
RatioStats ratio_stats(std::vector<double> ratios);
/// min and max of b each within tol (relative) of those of a.
bool envelope_stable(const RatioStats& a, const RatioStats& b, double tol = 0.2);

struct SampleRow {
    std::size_t index = 0;
    Vec x, y;
    SampleStrategy strategy = SampleStrategy::Uniform;
    double distance = 0;       ///< |x - y|
    double wall_distance = 0;  ///< min over simple walls of the distance from x and from y
    double kernel = 0, estimate = 0, ratio = 0;
    int bits = 0;
    double cancellation = 0;
    std::string subregion;
    double c_prime = 0;
};

struct Reject {
    std::size_t index = 0;
    Vec x, y;
    double cancellation = 0;
    std::string reason;
};

struct SubregionStats {
    std::string label;
    std::size_t count = 0;     ///< every sample classified here, rejected or not
    std::size_t rejected = 0;
    RatioStats ratio;
};

struct PrecisionStats {
    int min_bits = 0, max_bits = 0;
    double mean_bits = 0;
    double max_cancellation = 0;
    std::vector<std::pair<int, std::size_t>> tiers;  ///< (bits, samples)
};

struct FramingStats {
    RatioStats to_upper;  ///< P / upper
    RatioStats to_lower;  ///< P / lower
    double fitted_upper = 0;  ///< smallest C with P <= C upper
    double fitted_lower = 0;  ///< largest C with P >= C lower
};

struct SweepOptions {
    PrecisionPolicy policy{};
    EstimatorVariant estimator = EstimatorVariant::Phi;
    double c = 0;  ///< classification constant; 0 selects the default
    int threads = 1;
    double reject_cap = 1e-3;
    std::uint64_t seed = 0;  ///< echoed into the report
    std::string strategy;    ///< echoed into the report
    bool keep_rows = true;
};

struct BoundReport {
    static constexpr int schema_version = 1;
    std::string system_id;
    KernelType kernel = KernelType::Poisson;
    std::string measure;  ///< "omega" or "framing"
    EstimatorVariant estimator = EstimatorVariant::Phi;
    std::size_t sample_count = 0;
    RatioStats ratio;
    std::vector<SubregionStats> subregions;
    PrecisionStats precision;
    FramingStats framing;  ///< filled by framing_sweep
    std::vector<Reject> rejects;
    bool failed = false;
    std::uint64_t seed = 0;
    json config;
    std::vector<SampleRow> rows;
};

BoundReport ratio_sweep(const RootSystem& rs, KernelType k, const std::vector<SamplePair>& samples,
                        const SweepOptions& opt = {});
BoundReport framing_sweep(const RootSystem& rs, const std::vector<SamplePair>& samples, const SweepOptions& opt = {});

json report_to_json(const BoundReport& r, bool include_rows = false);
std::string report_rows_csv(const BoundReport& r);

}  // namespace dunklpot
