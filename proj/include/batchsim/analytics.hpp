#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "batchsim/types.hpp"

namespace batchsim {

// Closed-form cost model for a two-type workload: each event is
// independently "costly" with probability p_costly and "cheap" (a state
// overwrite that kills all preceding costly work in its batch) otherwise.
// Costs are measured in units of one costly event; cheap events are free.

class DegenerateProbability : public SimError {
public:
    explicit DegenerateProbability(double p)
        : SimError("probability " + std::to_string(p) + " must lie inside (0, 1)"), p_(p) {}

    double p() const noexcept { return p_; }

private:
    double p_;
};

struct SpeedupModel {
    std::uint32_t batch_len = 1;  // n, events per batch
    double p_costly = 0.5;        // per-event probability of the costly type
};

// Some quantities lose their closed form at p = 0 or p = 1 and are
// reported as the analytic limit instead; the flag records that.
struct AnalyticValue {
    double value = 0.0;
    bool degenerate_limit = false;
};

namespace detail {

inline void require_model(const SpeedupModel& m) {
    if (m.batch_len == 0) {
        throw SimError("batch length must be >= 1");
    }
    if (!(m.p_costly >= 0.0) || !(m.p_costly <= 1.0)) {
        throw DegenerateProbability(m.p_costly);
    }
}

}  // namespace detail

// Expected cost of n unbatched events: every costly event is paid for,
// so E[T_1] = n * p.
inline double expected_unbatched_cost(const SpeedupModel& m) {
    detail::require_model(m);
    return static_cast<double>(m.batch_len) * m.p_costly;
}

// Expected cost of one n-event batch after cross-event elimination: only
// the costly events after the last cheap event survive. Geometric-series
// closed form E[T_p] = (1 - p^n) / (1/p - 1), with limits 0 at p = 0 and
// n at p = 1.
inline AnalyticValue expected_batched_cost(const SpeedupModel& m) {
    detail::require_model(m);
    const double p = m.p_costly;
    const double n = static_cast<double>(m.batch_len);
    if (p == 0.0) {
        return {0.0, true};
    }
    if (p == 1.0) {
        return {n, true};
    }
    return {(1.0 - std::pow(p, n)) / (1.0 / p - 1.0), false};
}

// Same expectation evaluated as the defining sum
//   sum_{j=1}^{n-1} j * p^j * (1-p)  +  n * p^n
// (j surviving costly events iff the last cheap event sits j slots from
// the end; all-costly batches pay n). Kept as an independent route for
// cross-checking the closed form.
inline AnalyticValue batched_cost_summation(const SpeedupModel& m) {
    detail::require_model(m);
    const double p = m.p_costly;
    const double n = static_cast<double>(m.batch_len);
    if (p == 0.0) {
        return {0.0, true};
    }
    if (p == 1.0) {
        return {n, true};
    }
    double sum = 0.0;
    for (std::uint32_t j = 1; j < m.batch_len; ++j) {
        sum += static_cast<double>(j) * std::pow(p, j) * (1.0 - p);
    }
    sum += n * std::pow(p, n);
    return {sum, false};
}

// Upper bound on the batching speedup, s_max = E[T_1] / E[T_p]
//   = n (1 - p) / (1 - p^n),
// with limits n at p = 0 (every batch collapses to its final cheap event)
// and 1 at p = 1 (nothing can be eliminated).
inline AnalyticValue max_speedup(const SpeedupModel& m) {
    detail::require_model(m);
    const double p = m.p_costly;
    const double n = static_cast<double>(m.batch_len);
    if (p == 0.0) {
        return {n, true};
    }
    if (p == 1.0) {
        return {1.0, true};
    }
    return {n * (1.0 - p) / (1.0 - std::pow(p, n)), false};
}

struct MonteCarloResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

// Simulates the survival rule directly: draw n event types, count the
// costly events after the last cheap one. Agreement with
// expected_batched_cost within a few standard errors validates the
// closed form.
inline MonteCarloResult monte_carlo_batched_cost(const SpeedupModel& m, std::uint64_t samples,
                                                 std::uint64_t seed) {
    detail::require_model(m);
    if (samples == 0) {
        throw SimError("monte carlo needs at least one sample");
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution costly(m.p_costly);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        std::uint32_t trailing = 0;
        for (std::uint32_t i = 0; i < m.batch_len; ++i) {
            if (costly(rng)) {
                ++trailing;
            } else {
                trailing = 0;
            }
        }
        const double cost = static_cast<double>(trailing);
        sum += cost;
        sum_sq += cost * cost;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    MonteCarloResult result{mean, 0.0, samples};
    if (samples > 1) {
        const double variance = (sum_sq - n * mean * mean) / (n - 1.0);
        result.std_error = std::sqrt(std::max(variance, 0.0) / n);
    }
    return result;
}

}  // namespace batchsim
