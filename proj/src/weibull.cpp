#include "censeg/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "censeg/error.hpp"
#include "censeg/optimize.hpp"

namespace censeg {

std::size_t CensoredSample::uncensored_count() const {
    std::size_t n = 0;
    for (const auto& pt : points) n += pt.censored ? 0 : 1;
    return n;
}

double log1mexp(double z) {
    if (z <= 0.0) return -std::numeric_limits<double>::infinity();
    constexpr double ln2 = 0.6931471805599453;
    return z < ln2 ? std::log(-std::expm1(-z)) : std::log1p(-std::exp(-z));
}

double log_pdf(const WeibullParams& p, double y) {
    if (!(y > 0.0)) fail(errc::invalid, "log_pdf: y must be positive");
    const double ly = p.rate * y;
    return std::log(p.shape * p.rate) + (p.shape - 1.0) * std::log(ly) - std::pow(ly, p.shape);
}

double log_cdf(const WeibullParams& p, double q) {
    if (!(q > 0.0)) fail(errc::invalid, "log_cdf: q must be positive");
    return log1mexp(std::pow(p.rate * q, p.shape));
}

namespace {

// Per-distinct-value aggregation of a censored sample. Collapsing duplicates keeps
// repeated likelihood evaluations cheap inside the optimizers.
struct Aggregate {
    std::size_t n_unc = 0;
    double sum_log_y = 0.0;                         // over uncensored
    std::vector<std::pair<double, double>> unc;     // (y, count)
    std::vector<std::pair<double, double>> cens;    // (q, count)

    explicit Aggregate(const CensoredSample& s) {
        std::map<double, double> u, c;
        for (const auto& pt : s.points) {
            if (pt.censored) {
                c[pt.threshold] += 1.0;
            } else {
                u[pt.x] += 1.0;
                ++n_unc;
                sum_log_y += std::log(pt.x);
            }
        }
        unc.assign(u.begin(), u.end());
        cens.assign(c.begin(), c.end());
    }

    // sum over uncensored of y^shape, recomputed per shape value
    double sum_pow(double shape) const {
        double s = 0.0;
        for (const auto& [y, n] : unc) s += n * std::pow(y, shape);
        return s;
    }

    double censored_nll(double rate, double shape) const {
        double s = 0.0;
        for (const auto& [q, n] : cens) s -= n * log1mexp(std::pow(rate * q, shape));
        return s;
    }
};

double nll_from_stats(double rate, double shape, const Aggregate& agg, double sum_pow_shape) {
    const double n_unc = static_cast<double>(agg.n_unc);
    double v = agg.censored_nll(rate, shape);
    v += std::pow(rate, shape) * sum_pow_shape;
    v -= n_unc * std::log(shape * rate);
    v -= (shape - 1.0) * (n_unc * std::log(rate) + agg.sum_log_y);
    return v;
}

RateFit fit_rate_aggregated(const Aggregate& agg, double shape, const FitBox& box) {
    const double lo = std::log(box.lambda_min);
    const double hi = std::log(box.lambda_max);
    if (agg.n_unc == 0) {
        // censored-only NLL is strictly decreasing in the rate
        const double rate = box.lambda_max;
        return {rate, agg.censored_nll(rate, shape), true};
    }
    const double sp = agg.sum_pow(shape);
    const auto obj = [&](double t) { return nll_from_stats(std::exp(t), shape, agg, sp); };
    const ScalarMin r = minimize_bracketed(obj, lo, hi, 33, 1e-10);
    const double rate = std::exp(r.x);
    const bool degen = rate <= box.lambda_min * (1.0 + 1e-6) || rate >= box.lambda_max * (1.0 - 1e-6);
    return {rate, r.f, degen};
}

}  // namespace

double neg_log_likelihood(const WeibullParams& p, const CensoredSample& s) {
    if (s.empty()) fail(errc::invalid, "neg_log_likelihood: empty sample");
    double v = 0.0;
    for (const auto& pt : s.points) {
        if (pt.censored) {
            v -= log1mexp(std::pow(p.rate * pt.threshold, p.shape));
        } else {
            const double ly = p.rate * pt.x;
            v += std::pow(ly, p.shape) - std::log(p.shape * p.rate) - (p.shape - 1.0) * std::log(ly);
        }
    }
    return v;
}

double neg_log_likelihood_d_rate(const WeibullParams& p, const CensoredSample& s) {
    double g = 0.0;
    for (const auto& pt : s.points) {
        if (pt.censored) {
            const double z = std::pow(p.rate * pt.threshold, p.shape);
            g -= p.shape * z / (p.rate * std::expm1(z));
        } else {
            const double z = std::pow(p.rate * pt.x, p.shape);
            g += p.shape * (z - 1.0) / p.rate;
        }
    }
    return g;
}

RateFit fit_rate_fixed_shape(const CensoredSample& s, double shape, const FitBox& box) {
    if (s.empty()) fail(errc::invalid, "fit_rate_fixed_shape: empty sample");
    if (!(shape >= box.sigma_min && shape <= box.sigma_max))
        fail(errc::invalid, "fit_rate_fixed_shape: shape outside feasibility box");
    return fit_rate_aggregated(Aggregate(s), shape, box);
}

WeibullParams fit_mle(const CensoredSample& s, const FitBox& box) {
    if (s.empty()) fail(errc::invalid, "fit_mle: empty sample");
    const Aggregate agg(s);
    if (agg.n_unc == 0) return {box.lambda_max, 1.0, true};

    const double lo = std::log(box.sigma_min);
    const double hi = std::log(box.sigma_max);
    const auto profile = [&](double t) { return fit_rate_aggregated(agg, std::exp(t), box).nll; };
    const ScalarMin r = minimize_bracketed(profile, lo, hi, 33, 1e-10);
    const double shape = std::exp(r.x);
    const RateFit rf = fit_rate_aggregated(agg, shape, box);
    const bool shape_degen = shape <= box.sigma_min * (1.0 + 1e-6) || shape >= box.sigma_max * (1.0 - 1e-6);
    return {rf.rate, shape, rf.degenerate || shape_degen};
}

CensoredSample sample_weibull(const WeibullParams& p, std::span<const double> thresholds,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CensoredSample out;
    out.points.reserve(thresholds.size());
    for (const double q : thresholds) {
        const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
        const double y = std::pow(-std::log(u), 1.0 / p.shape) / p.rate;
        if (y < q)
            out.push_censored(q);
        else
            out.push_uncensored(y, q);
    }
    return out;
}

}  // namespace censeg
