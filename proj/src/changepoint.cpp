#include "censeg/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "censeg/error.hpp"
#include "censeg/optimize.hpp"

namespace censeg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

struct SegmentCostModel::Impl {
    std::size_t K = 0;
    double sigma = 0.0;
    FitBox box;
    std::size_t min_seg = 2;

    // prefix sums over uncensored entries
    std::vector<double> cum_n_unc;
    std::vector<double> cum_pow;    // sum y^sigma
    std::vector<double> cum_log;    // sum log y
    // censored entries grouped by distinct threshold: counts[j] is a (K+1)-prefix
    std::vector<double> thresholds;
    std::vector<std::vector<std::int32_t>> cens_counts;

    mutable std::unordered_map<std::uint64_t, SegCost> memo;

    Impl(const CoarseSeries& series, double sigma_hat, const FitBox& b, std::size_t min_len)
        : K(series.size()), sigma(sigma_hat), box(b), min_seg(min_len) {
        if (K == 0) fail(errc::invalid, "segment cost model: empty series");
        if (min_seg < 1) fail(errc::invalid, "segment cost model: min segment length must be >= 1");
        if (!(sigma >= box.sigma_min && sigma <= box.sigma_max))
            fail(errc::invalid, "segment cost model: sigma outside feasibility box");
        cum_n_unc.assign(K + 1, 0.0);
        cum_pow.assign(K + 1, 0.0);
        cum_log.assign(K + 1, 0.0);
        std::map<double, std::size_t> idx;
        for (const auto& e : series.entries)
            if (e.censored) idx.emplace(e.q_bar, idx.size());
        thresholds.resize(idx.size());
        for (const auto& [q, j] : idx) thresholds[j] = q;
        cens_counts.assign(idx.size(), std::vector<std::int32_t>(K + 1, 0));
        for (std::size_t k = 0; k < K; ++k) {
            const auto& e = series.entries[k];
            cum_n_unc[k + 1] = cum_n_unc[k] + (e.censored ? 0.0 : 1.0);
            cum_pow[k + 1] = cum_pow[k] + (e.censored ? 0.0 : std::pow(e.y_bar, sigma));
            cum_log[k + 1] = cum_log[k] + (e.censored ? 0.0 : std::log(e.y_bar));
            for (std::size_t j = 0; j < thresholds.size(); ++j)
                cens_counts[j][k + 1] =
                    cens_counts[j][k] + ((e.censored && e.q_bar == thresholds[j]) ? 1 : 0);
        }
    }

    // censored threshold groups present in [a, b)
    std::vector<std::pair<double, double>> segment_groups(std::size_t a, std::size_t b) const {
        std::vector<std::pair<double, double>> groups;
        for (std::size_t j = 0; j < thresholds.size(); ++j) {
            const auto c = cens_counts[j][b] - cens_counts[j][a];
            if (c > 0) groups.emplace_back(thresholds[j], static_cast<double>(c));
        }
        return groups;
    }

    static double nll(double rate, double sigma, double n_unc, double sum_pow, double sum_log,
                      const std::vector<std::pair<double, double>>& groups) {
        double v = std::pow(rate, sigma) * sum_pow - n_unc * std::log(sigma * rate) -
                   (sigma - 1.0) * (n_unc * std::log(rate) + sum_log);
        for (const auto& [q, c] : groups) v -= c * log1mexp(std::pow(rate * q, sigma));
        return v;
    }

    SegCost compute(std::size_t a, std::size_t b) const {
        const double n_unc = cum_n_unc[b] - cum_n_unc[a];
        const auto groups = segment_groups(a, b);
        if (n_unc == 0.0) {
            const double rate = box.lambda_max;
            return {nll(rate, sigma, 0.0, 0.0, 0.0, groups), rate, true};
        }
        const double sum_pow = cum_pow[b] - cum_pow[a];
        const double sum_log = cum_log[b] - cum_log[a];
        const double lo = std::log(box.lambda_min);
        const double hi = std::log(box.lambda_max);
        const auto obj = [&](double t) {
            return nll(std::exp(t), sigma, n_unc, sum_pow, sum_log, groups);
        };
        const ScalarMin r = minimize_bracketed(obj, lo, hi, 33, 1e-10);
        const double rate = std::exp(r.x);
        const bool degen =
            rate <= box.lambda_min * (1.0 + 1e-6) || rate >= box.lambda_max * (1.0 - 1e-6);
        return {r.f, rate, degen};
    }
};

SegmentCostModel::SegmentCostModel(const CoarseSeries& series, double sigma_hat, const FitBox& box,
                                   std::size_t min_segment_length)
    : impl_(std::make_unique<Impl>(series, sigma_hat, box, min_segment_length)) {}
SegmentCostModel::~SegmentCostModel() = default;
SegmentCostModel::SegmentCostModel(SegmentCostModel&&) noexcept = default;
SegmentCostModel& SegmentCostModel::operator=(SegmentCostModel&&) noexcept = default;

SegmentCostModel::SegCost SegmentCostModel::operator()(std::size_t a, std::size_t b) const {
    if (a >= b || b > impl_->K) fail(errc::invalid, "segment cost: bad index range");
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (const auto it = impl_->memo.find(key); it != impl_->memo.end()) return it->second;
    const SegCost c = impl_->compute(a, b);
    impl_->memo.emplace(key, c);
    return c;
}

std::size_t SegmentCostModel::size() const { return impl_->K; }
double SegmentCostModel::sigma() const { return impl_->sigma; }
std::size_t SegmentCostModel::min_segment_length() const { return impl_->min_seg; }
const FitBox& SegmentCostModel::box() const { return impl_->box; }

namespace {

Segmentation assemble(const SegmentCostModel& model, std::vector<std::size_t> breaks, double beta) {
    const std::size_t K = model.size();
    Segmentation seg;
    seg.breaks = std::move(breaks);
    seg.penalty = beta;
    seg.sigma_hat = model.sigma();
    std::size_t prev = 0;
    double nll = 0.0;
    for (std::size_t i = 0; i <= seg.breaks.size(); ++i) {
        const std::size_t end = i < seg.breaks.size() ? seg.breaks[i] : K;
        const auto c = model(prev, end);
        seg.rates.push_back(c.rate);
        seg.degenerate.push_back(c.degenerate);
        nll += c.cost;
        prev = end;
    }
    seg.nll = nll;
    seg.cost = nll + beta * static_cast<double>(seg.segment_count());
    return seg;
}

}  // namespace

Segmentation pelt(const SegmentCostModel& model, double beta) {
    if (beta < 0.0) fail(errc::invalid, "pelt: penalty must be nonnegative");
    const std::size_t K = model.size();
    const std::size_t ms = std::min(model.min_segment_length(), K);

    std::vector<double> F(K + 1, kInf);
    std::vector<std::size_t> last(K + 1, 0);
    F[0] = -beta;

    struct Candidate {
        std::size_t tau;
        std::size_t expiry;  // removable once t >= expiry
        double cost_at_t;    // scratch, filled during each evaluation pass
    };
    std::vector<Candidate> cands;
    cands.push_back({0, std::numeric_limits<std::size_t>::max(), 0.0});

    for (std::size_t t = ms; t <= K; ++t) {
        std::erase_if(cands, [t](const Candidate& c) { return c.expiry <= t; });
        if (t >= 2 * ms) cands.push_back({t - ms, std::numeric_limits<std::size_t>::max(), 0.0});

        double best = kInf;
        std::size_t best_tau = 0;
        for (auto& c : cands) {
            c.cost_at_t = model(c.tau, t).cost;
            const double v = F[c.tau] + c.cost_at_t + beta;
            if (v < best) {
                best = v;
                best_tau = c.tau;
            }
        }
        F[t] = best;
        last[t] = best_tau;

        // A candidate failing the test here is provably suboptimal for every t' >= t + ms
        // (cost subadditivity); it must stay usable before that horizon.
        for (auto& c : cands)
            if (c.expiry == std::numeric_limits<std::size_t>::max() &&
                F[c.tau] + c.cost_at_t > F[t])
                c.expiry = t + ms;
    }

    std::vector<std::size_t> breaks;
    for (std::size_t t = K; t > 0; t = last[t])
        if (last[t] > 0) breaks.push_back(last[t]);
    std::reverse(breaks.begin(), breaks.end());
    return assemble(model, std::move(breaks), beta);
}

namespace {

void crops_recurse(const SegmentCostModel& model, double b_lo, const Segmentation& s_lo,
                   double b_hi, const Segmentation& s_hi,
                   std::map<std::size_t, PenaltyPathEntry>& found) {
    const std::size_t l_lo = s_lo.change_point_count();
    const std::size_t l_hi = s_hi.change_point_count();
    if (l_lo <= l_hi + 1) return;
    if (b_hi - b_lo < 1e-6) return;
    const double beta_star =
        (s_hi.nll - s_lo.nll) / static_cast<double>(l_lo - l_hi);
    if (!(beta_star > b_lo && beta_star < b_hi)) return;
    Segmentation s_star = pelt(model, beta_star);
    const std::size_t l_star = s_star.change_point_count();
    if (const auto it = found.find(l_star); it == found.end() || beta_star < it->second.beta)
        found.insert_or_assign(l_star, PenaltyPathEntry{beta_star, s_star});
    if (l_star == l_hi) return;
    if (l_star == l_lo) {
        crops_recurse(model, beta_star, s_star, b_hi, s_hi, found);
        return;
    }
    crops_recurse(model, b_lo, s_lo, beta_star, s_star, found);
    crops_recurse(model, beta_star, s_star, b_hi, s_hi, found);
}

}  // namespace

PenaltyPath crops(const SegmentCostModel& model, double beta_min, double beta_max) {
    if (beta_min < 0.0 || beta_min > beta_max) fail(errc::invalid, "crops: bad penalty range");
    std::map<std::size_t, PenaltyPathEntry> found;
    Segmentation s_lo = pelt(model, beta_min);
    found[s_lo.change_point_count()] = {beta_min, s_lo};
    if (beta_max > beta_min) {
        Segmentation s_hi = pelt(model, beta_max);
        const std::size_t l_hi = s_hi.change_point_count();
        if (const auto it = found.find(l_hi); it == found.end() || beta_max < it->second.beta)
            found.emplace(l_hi, PenaltyPathEntry{beta_max, s_hi});
        crops_recurse(model, beta_min, s_lo, beta_max, s_hi, found);
    }
    PenaltyPath path;
    path.reserve(found.size());
    for (auto it = found.rbegin(); it != found.rend(); ++it) path.push_back(it->second);
    return path;
}

std::size_t elbow_select(std::span<const std::pair<double, double>> points) {
    const std::size_t n = points.size();
    if (n < 5) fail(errc::invalid, "elbow_select: need at least 5 points");
    for (std::size_t i = 1; i < n; ++i)
        if (!(points[i].first > points[i - 1].first))
            fail(errc::invalid, "elbow_select: x values must be strictly increasing");

    const auto sse = [&](std::size_t lo, std::size_t hi) {  // inclusive range, >= 2 points
        const double m = static_cast<double>(hi - lo + 1);
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) {
            sx += points[i].first;
            sy += points[i].second;
        }
        const double mx = sx / m, my = sy / m;
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) {
            const double dx = points[i].first - mx;
            const double dy = points[i].second - my;
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
        return syy - sxy * sxy / sxx;
    };

    std::size_t best = 1;
    double best_sse = kInf;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double total = sse(0, j) + sse(j, n - 1);
        if (total < best_sse) {
            best_sse = total;
            best = j;
        }
    }
    return best;
}

SegmentPipelineResult segment_pipeline(const CoarseSeries& series,
                                       const SegmentPipelineOptions& opts) {
    if (series.empty()) fail(errc::invalid, "segment_pipeline: empty series");
    const CensoredSample whole = to_censored_sample(series, 0, series.size());
    if (whole.uncensored_count() == 0)
        fail(errc::invalid, "segment_pipeline: series has no quantified value");
    const WeibullParams global = fit_mle(whole, opts.box);

    SegmentPipelineResult result;
    result.sigma_hat = global.shape;
    SegmentCostModel model(series, global.shape, opts.box, opts.min_segment_length);
    const double log_k = std::log(static_cast<double>(series.size()));
    const double b_lo = std::max(0.0, opts.penalty_factor_min * log_k);
    const double b_hi = std::max(b_lo, opts.penalty_factor_max * log_k);
    result.path = crops(model, b_lo, b_hi);

    if (result.path.size() >= 5) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(result.path.size());
        for (auto it = result.path.rbegin(); it != result.path.rend(); ++it)
            pts.emplace_back(static_cast<double>(it->segmentation.change_point_count()),
                             it->segmentation.nll);
        const std::size_t knee = elbow_select(pts);
        result.segmentation = result.path[result.path.size() - 1 - knee].segmentation;
    } else {
        result.segmentation = result.path.back().segmentation;
    }
    return result;
}

}  // namespace censeg
