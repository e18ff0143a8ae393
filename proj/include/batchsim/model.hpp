#pragma once

#include <concepts>
#include <cstddef>
#include <map>
#include <vector>

#include "batchsim/types.hpp"

namespace batchsim {

// A simulation model is a type with this shape:
//
//   struct MyModel {
//       using State = ...;              // mutated in place by handlers
//       using Payload = ...;            // uniform event payload, Empty if unused
//       static constexpr std::size_t alphabet_size = ...;
//       template <std::size_t I>        // I in [0, alphabet_size); handles type id I + 1
//       static void handle(State&, const BasicEvent<Payload>&, RequestBuffer<Payload>&);
//   };
//
// Handlers are static templates so their bodies stay visible to the batch
// composer; a handler must not hide work behind calls the optimizer cannot
// see into. New events are emitted through the buffer, never scheduled
// directly.
template <class M>
concept SimulationModel = requires {
    typename M::State;
    typename M::Payload;
    requires std::convertible_to<decltype(M::alphabet_size), std::size_t>;
};

class MissingLookahead : public SimError {
public:
    explicit MissingLookahead(EventTypeId type)
        : SimError("no lookahead defined for event type " + std::to_string(type)), type_(type) {}
    EventTypeId type() const noexcept { return type_; }

private:
    EventTypeId type_;
};

class NegativeLookahead : public SimError {
public:
    NegativeLookahead(EventTypeId type, std::int64_t value)
        : SimError("lookahead for event type " + std::to_string(type) + " is negative (" +
                   std::to_string(value) + ")"),
          type_(type) {}
    EventTypeId type() const noexcept { return type_; }

private:
    EventTypeId type_;
};

// Per-type minimum delta between an event's execution time and the time of
// any event it creates. Entries may be zero; zero simply caps the batch
// window at that event's own timestamp.
struct LookaheadTable {
    std::map<EventTypeId, std::int64_t> delta;

    static LookaheadTable uniform(std::size_t alphabet_size, std::int64_t value) {
        LookaheadTable t;
        for (std::size_t i = 1; i <= alphabet_size; ++i) {
            t.delta.emplace(static_cast<EventTypeId>(i), value);
        }
        return t;
    }
};

// Runtime half of a model: the handlers live in M, the lookaheads and the
// initial state are data.
template <SimulationModel M>
struct ModelDefinition {
    LookaheadTable lookaheads{};
    typename M::State initial_state{};
};

template <SimulationModel M>
class ValidatedModel;

template <SimulationModel M>
ValidatedModel<M> validate_model(const ModelDefinition<M>& def);

// A ModelDefinition that passed validation: every type has a non-negative
// lookahead, so engine-side lookups can never miss.
template <SimulationModel M>
class ValidatedModel {
public:
    using Model = M;
    static constexpr std::size_t alphabet_size = M::alphabet_size;

    // Precondition: 1 <= type <= alphabet_size.
    SimTime lookahead(EventTypeId type) const noexcept { return lookahead_[type]; }

    const typename M::State& initial_state() const noexcept { return initial_; }

private:
    friend ValidatedModel<M> validate_model<M>(const ModelDefinition<M>&);
    ValidatedModel() = default;

    std::vector<SimTime> lookahead_;  // indexed by type id, slot 0 unused
    typename M::State initial_{};
};

template <SimulationModel M>
ValidatedModel<M> validate_model(const ModelDefinition<M>& def) {
    if constexpr (M::alphabet_size == 0) {
        throw EmptyAlphabet();
    }
    for (const auto& [type, value] : def.lookaheads.delta) {
        if (type == kNoEvent || type > M::alphabet_size) {
            throw InvalidTypeId(type, M::alphabet_size);
        }
    }
    ValidatedModel<M> out;
    out.lookahead_.resize(M::alphabet_size + 1, 0);
    for (std::size_t i = 1; i <= M::alphabet_size; ++i) {
        const auto type = static_cast<EventTypeId>(i);
        auto it = def.lookaheads.delta.find(type);
        if (it == def.lookaheads.delta.end()) {
            throw MissingLookahead(type);
        }
        if (it->second < 0) {
            throw NegativeLookahead(type, it->second);
        }
        out.lookahead_[i] = static_cast<SimTime>(it->second);
    }
    out.initial_ = def.initial_state;
    return out;
}

}  // namespace batchsim
