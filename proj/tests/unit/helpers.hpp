#ifndef CENSEG_TEST_HELPERS_HPP
#define CENSEG_TEST_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "censeg/ingest.hpp"
#include "censeg/weibull.hpp"

namespace censeg::test {

inline double uniform01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

inline double weibull_draw(std::mt19937_64& rng, double rate, double shape) {
    return std::pow(-std::log(uniform01(rng)), 1.0 / shape) / rate;
}

// Weibull quantile: the threshold giving censoring fraction f.
inline double censor_threshold(double rate, double shape, double f) {
    return std::pow(-std::log1p(-f), 1.0 / shape) / rate;
}

// Independent naive NLL evaluation (direct per-point formula, no aggregation).
inline double oracle_nll(double rate, double shape, const CensoredSample& s) {
    double v = 0.0;
    for (const auto& pt : s.points) {
        if (pt.censored) {
            const double z = std::pow(rate * pt.threshold, shape);
            v -= std::log1p(-std::exp(-z));
        } else {
            v += std::pow(rate * pt.x, shape) - std::log(shape * rate) -
                 (shape - 1.0) * std::log(rate * pt.x);
        }
    }
    return v;
}

// Random piece-wise stationary coarse series with censoring at a shared threshold set.
inline CoarseSeries random_series(std::mt19937_64& rng, std::size_t k,
                                  const std::vector<std::size_t>& breaks,
                                  const std::vector<double>& rates, double shape, double loq) {
    CoarseSeries s;
    std::size_t regime = 0;
    for (std::size_t i = 0; i < k; ++i) {
        while (regime < breaks.size() && i >= breaks[regime]) ++regime;
        const double y = weibull_draw(rng, rates[regime], shape);
        if (y < loq)
            s.entries.push_back({static_cast<Day>(i), loq, loq, true});
        else
            s.entries.push_back({static_cast<Day>(i), y, loq, false});
    }
    return s;
}

}  // namespace censeg::test

#endif
