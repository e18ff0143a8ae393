#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "batchsim/model.hpp"
#include "batchsim/types.hpp"

namespace batchsim {

// Two-type synthetic model: Increment runs a configurable-length loop of
// sum <- sum + sum + 1, Set overwrites sum with a constant. A Set makes
// every earlier Increment in the same batch dead, so composed batches
// give the optimizer real cross-event elimination opportunities, while
// the standalone loop (x -> 2x + 1 has no affine closed form) stays
// linear in `iterations`.

struct PocState {
    std::uint64_t sum = 0;
    std::uint64_t iterations = 1'000'000;  // loop count per Increment event

    friend bool operator==(const PocState&, const PocState&) = default;
};

struct PocModel {
    using State = PocState;
    using Payload = Empty;
    static constexpr std::size_t alphabet_size = 2;

    static constexpr EventTypeId increment_type = 1;
    static constexpr EventTypeId set_type = 2;
    static constexpr std::uint64_t set_value = 10;

    template <std::size_t I>
    static void handle(State& state, const BasicEvent<Payload>&, RequestBuffer<Payload>&) {
        if constexpr (I == 0) {
            for (std::uint64_t i = 0; i < state.iterations; ++i) {
                state.sum = state.sum + state.sum + 1;  // unsigned wraparound is intended
            }
        } else {
            static_assert(I == 1);
            state.sum = set_value;
        }
    }
};

struct PocWorkload {
    std::vector<EventRequest<Empty>> events;
    ModelDefinition<PocModel> definition;
};

// One event per integer timestamp 0..count-1, independently Set with
// probability p_set. Both types get the same generous lookahead
// (default: the whole horizon) so any batch length is admissible and
// batching behavior is controlled entirely by the engine's n.
inline PocWorkload build_workload(std::uint64_t count, double p_set, std::uint64_t seed,
                                  std::uint64_t iterations = 1'000'000,
                                  std::optional<SimTime> lookahead = std::nullopt) {
    if (!(p_set >= 0.0) || !(p_set <= 1.0)) {
        throw SimError("p_set must lie in [0, 1]");
    }
    if (iterations == 0) {
        throw SimError("iterations must be >= 1");
    }
    const SimTime la = lookahead.value_or(count > 0 ? count : 1);

    PocWorkload workload;
    workload.definition.lookaheads =
        LookaheadTable::uniform(PocModel::alphabet_size, static_cast<std::int64_t>(la));
    workload.definition.initial_state = PocState{0, iterations};
    workload.events.reserve(count);

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution is_set(p_set);
    for (std::uint64_t t = 0; t < count; ++t) {
        const EventTypeId type = is_set(rng) ? PocModel::set_type : PocModel::increment_type;
        workload.events.push_back({type, t, Empty{}});
    }
    return workload;
}

}  // namespace batchsim
