#ifndef CENSEG_WEIBULL_HPP
#define CENSEG_WEIBULL_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace censeg {

// Feasibility box for the rate/shape fits. Boundary hits are flagged degenerate.
struct FitBox {
    double lambda_min = 1e-6;
    double lambda_max = 1e6;
    double sigma_min = 0.05;
    double sigma_max = 20.0;
};

struct WeibullParams {
    double rate = 1.0;   // lambda, 1/(ug/L)
    double shape = 1.0;  // sigma, dimensionless
    bool degenerate = false;
};

// One left-censored observation: censored entries carry x == threshold.
struct CensoredPoint {
    double x;
    double threshold;
    bool censored;
};

struct CensoredSample {
    std::vector<CensoredPoint> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    std::size_t uncensored_count() const;
    void push_uncensored(double value, double threshold) { points.push_back({value, threshold, false}); }
    void push_censored(double threshold) { points.push_back({threshold, threshold, true}); }
};

// log(1 - exp(-z)) for z > 0, stable on both ends.
double log1mexp(double z);

// log f(y; rate, shape) = log(sigma*lambda) + (sigma-1) log(lambda y) - (lambda y)^sigma
double log_pdf(const WeibullParams& p, double y);

// log F(q; rate, shape) = log(1 - exp(-(lambda q)^sigma))
double log_cdf(const WeibullParams& p, double q);

// -sum_cens log F(q_i) + sum_unc [(lambda y_i)^sigma - log(sigma lambda) - (sigma-1) log(lambda y_i)]
double neg_log_likelihood(const WeibullParams& p, const CensoredSample& s);

// Analytic d/d(rate) of neg_log_likelihood; used by the finite-difference property tests.
double neg_log_likelihood_d_rate(const WeibullParams& p, const CensoredSample& s);

struct RateFit {
    double rate = 0.0;
    double nll = 0.0;
    bool degenerate = false;
};

// Rate-only MLE with the shape held fixed; bounded 1-D minimization on log(rate).
// All-censored samples hit the lambda_max boundary (the censored NLL is strictly
// decreasing in the rate) and are flagged degenerate.
RateFit fit_rate_fixed_shape(const CensoredSample& s, double shape, const FitBox& box = {});

// Joint (rate, shape) MLE: profile minimization of the shape with a nested rate fit.
WeibullParams fit_mle(const CensoredSample& s, const FitBox& box = {});

// Inverse-CDF sampling, censored below the per-draw threshold. Deterministic per seed,
// independent of platform (raw 53-bit uniforms from mt19937_64).
CensoredSample sample_weibull(const WeibullParams& p, std::span<const double> thresholds,
                              std::uint64_t seed);

}  // namespace censeg

#endif
