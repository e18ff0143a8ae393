#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "batchsim/model.hpp"
#include "batchsim/types.hpp"

namespace batchsim {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                            std::uint64_t d) noexcept {
    return splitmix64(splitmix64(splitmix64(splitmix64(a) ^ b) ^ c) ^ d);
}

}  // namespace detail

// Family of behavior-randomized models with K event types, used to check
// that batched and baseline execution agree for arbitrary models that
// honor the lookahead contract. All per-model randomness lives in the
// state (update rules, salt, spawn policy); the handlers themselves are
// deterministic in (state, event), which is what makes cross-mode
// equivalence a meaningful oracle. Handlers also append every executed
// event to a trace, so tests can compare execution order, not just the
// folded counter values.
//
// Child events derive from a hash of (salt, time, seq): expected child
// count is 5/8 (subcritical, so cascades die out) and every child is
// scheduled at least one time unit ahead, so runs always terminate.
template <std::size_t K>
struct ParametricModel {
    static_assert(K >= 1);

    struct Rule {
        std::uint64_t mult = 1;
        std::uint64_t add = 0;

        friend bool operator==(const Rule&, const Rule&) = default;
    };

    struct TraceEntry {
        SimTime time = 0;
        SeqNo seq = 0;
        EventTypeId type = kNoEvent;
        std::uint64_t payload = 0;

        friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
    };

    struct State {
        std::array<std::uint64_t, K> counters{};
        std::array<Rule, K> rules{};
        std::array<SimTime, K> lookahead{};  // mirror of the model's lookahead table
        SimTime spawn_horizon = 0;           // events later than this spawn no children
        std::uint32_t child_spread = 1;      // modulus for extra child delay, >= 1
        std::uint64_t salt = 0;
        std::vector<TraceEntry> trace;

        friend bool operator==(const State&, const State&) = default;
    };

    using Payload = std::uint64_t;
    static constexpr std::size_t alphabet_size = K;

    template <std::size_t I>
    static void handle(State& s, const BasicEvent<Payload>& ev, RequestBuffer<Payload>& out) {
        static_assert(I < K);
        const Rule& rule = s.rules[I];
        s.counters[I] = s.counters[I] * rule.mult + rule.add + ev.payload;
        s.trace.push_back({ev.time, ev.seq, ev.type, ev.payload});

        if (ev.time > s.spawn_horizon) {
            return;
        }
        const std::uint64_t h = detail::mix(s.salt, ev.time, ev.seq, I);
        const std::uint64_t r = h % 8;
        const int kids = r < 4 ? 0 : (r < 7 ? 1 : 2);
        for (int k = 0; k < kids; ++k) {
            const std::uint64_t hk = detail::mix(h, static_cast<std::uint64_t>(k) + 1, 0, 0);
            const auto child_type = static_cast<EventTypeId>(hk % K + 1);
            const SimTime la = s.lookahead[I];
            const SimTime extra = (hk >> 3) % s.child_spread;
            const SimTime delay = (la > 0 ? la : 1) + extra;
            out.emit(child_type, saturating_add(ev.time, delay), hk);
        }
    }
};

template <std::size_t K>
struct ParametricWorkload {
    ModelDefinition<ParametricModel<K>> definition;
    std::vector<EventRequest<std::uint64_t>> events;
};

// Draws a complete random model instance plus initial events: per-type
// update rules, per-type lookaheads in [0, 3], spawn policy, and
// event_count initial events at random times with random payloads.
template <std::size_t K>
ParametricWorkload<K> random_parametric_workload(std::uint64_t seed, std::uint64_t event_count) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> any;
    std::uniform_int_distribution<std::int64_t> la_dist(0, 3);
    std::uniform_int_distribution<std::uint32_t> spread_dist(1, 4);

    ParametricWorkload<K> w;
    auto& state = w.definition.initial_state;
    for (std::size_t i = 0; i < K; ++i) {
        const auto type = static_cast<EventTypeId>(i + 1);
        const std::int64_t la = la_dist(rng);
        w.definition.lookaheads.delta.emplace(type, la);
        state.lookahead[i] = static_cast<SimTime>(la);
        state.rules[i] = {any(rng) | 1, any(rng)};  // odd multiplier keeps orbits long
    }
    state.spawn_horizon = event_count * 2;
    state.child_spread = spread_dist(rng);
    state.salt = any(rng);

    std::uniform_int_distribution<SimTime> time_dist(0, event_count);
    std::uniform_int_distribution<EventTypeId> type_dist(1, static_cast<EventTypeId>(K));
    w.events.reserve(event_count);
    for (std::uint64_t i = 0; i < event_count; ++i) {
        w.events.push_back({type_dist(rng), time_dist(rng), any(rng)});
    }
    return w;
}

}  // namespace batchsim
