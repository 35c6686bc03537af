#ifndef CENSEG_CHANGEPOINT_HPP
#define CENSEG_CHANGEPOINT_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "censeg/ingest.hpp"
#include "censeg/weibull.hpp"

namespace censeg {

// Optimal penalized segmentation of a coarse series. breaks holds the strictly
// increasing interior indices eta_1..eta_L (segment l covers entries [eta_l, eta_{l+1})
// with eta_0 = 0 and eta_{L+1} = K); rates holds the L+1 per-segment rate estimates.
struct Segmentation {
    std::vector<std::size_t> breaks;
    std::vector<double> rates;
    std::vector<bool> degenerate;  // per segment, all-censored boundary fits
    double nll = 0.0;              // unpenalized total segment cost
    double cost = 0.0;             // nll + penalty * (L+1)
    double penalty = 0.0;
    double sigma_hat = 0.0;

    std::size_t change_point_count() const { return breaks.size(); }
    std::size_t segment_count() const { return breaks.size() + 1; }
};

// Fixed-shape censored-Weibull segment cost with memoization. Holds prefix sums of the
// uncensored sufficient statistics and per-threshold censored counts, so one evaluation
// of the rate objective is O(#distinct thresholds) instead of O(segment length).
// Not thread-safe: use one instance per run.
class SegmentCostModel {
public:
    SegmentCostModel(const CoarseSeries& series, double sigma_hat, const FitBox& box = {},
                     std::size_t min_segment_length = 2);
    ~SegmentCostModel();
    SegmentCostModel(SegmentCostModel&&) noexcept;
    SegmentCostModel& operator=(SegmentCostModel&&) noexcept;

    struct SegCost {
        double cost;
        double rate;
        bool degenerate;
    };

    // Cost of entries [a, b); memoized.
    SegCost operator()(std::size_t a, std::size_t b) const;

    std::size_t size() const;
    double sigma() const;
    std::size_t min_segment_length() const;
    const FitBox& box() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Penalized exact segmentation via PELT; identical to the O(K^2) optimal-partitioning
// recursion (pruned candidates are kept alive until provably dominated for every
// reachable horizon, so the minimum-segment-length constraint stays exact).
Segmentation pelt(const SegmentCostModel& model, double beta);

struct PenaltyPathEntry {
    double beta;
    Segmentation segmentation;
};

// All optimal segmentations for beta in [beta_min, beta_max], one entry per distinct
// change-point count, ordered by increasing beta (decreasing count).
using PenaltyPath = std::vector<PenaltyPathEntry>;

PenaltyPath crops(const SegmentCostModel& model, double beta_min, double beta_max);

// Two-piece linear elbow: the split index minimizing SSE(left fit) + SSE(right fit),
// the knee point belonging to both sides; ties break toward smaller x.
std::size_t elbow_select(std::span<const std::pair<double, double>> points);

struct SegmentPipelineOptions {
    double penalty_factor_min = 0.2;  // times log(K)
    double penalty_factor_max = 5.0;
    std::size_t min_segment_length = 2;
    FitBox box{};
};

struct SegmentPipelineResult {
    double sigma_hat = 0.0;
    Segmentation segmentation;
    PenaltyPath path;
};

// Global shape MLE, CROPS over [f_min log K, f_max log K], elbow on (L, nll) points.
// Paths with fewer than 5 distinct counts fall back to the largest-penalty entry.
SegmentPipelineResult segment_pipeline(const CoarseSeries& series,
                                       const SegmentPipelineOptions& opts = {});

}  // namespace censeg

#endif
