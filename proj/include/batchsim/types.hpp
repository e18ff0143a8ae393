#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace batchsim {

// Event types are numbered 1..|alphabet|. 0 is the reserved "no event"
// digit of the batch-id number system and never names a real handler.
using EventTypeId = std::uint32_t;
using SimTime = std::uint64_t;
using SeqNo = std::uint64_t;

inline constexpr EventTypeId kNoEvent = 0;

struct Empty {
    friend constexpr bool operator==(Empty, Empty) noexcept { return true; }
};

// (time, seq) is unique within one engine instance; seq is a monotone
// creation counter and breaks ties between equal timestamps.
template <class Payload = Empty>
struct BasicEvent {
    EventTypeId type = kNoEvent;
    SimTime time = 0;
    SeqNo seq = 0;
    [[no_unique_address]] Payload payload{};
};

using Event = BasicEvent<>;

// What a handler asks the scheduler to insert. The seq is assigned at
// insertion time, not here.
template <class Payload = Empty>
struct EventRequest {
    EventTypeId type = kNoEvent;
    SimTime time = 0;
    [[no_unique_address]] Payload payload{};
};

// Timestamps saturate instead of wrapping; a window bound past the end of
// the representable range means "no bound".
constexpr SimTime saturating_add(SimTime a, SimTime b) noexcept {
    SimTime r = a + b;
    return r < a ? ~SimTime{0} : r;
}

class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyAlphabet : public SimError {
public:
    EmptyAlphabet() : SimError("model has no event handlers") {}
};

class InvalidTypeId : public SimError {
public:
    explicit InvalidTypeId(EventTypeId type, std::size_t alphabet_size)
        : SimError("event type " + std::to_string(type) + " outside [1, " +
                   std::to_string(alphabet_size) + "]"),
          type_(type) {}
    EventTypeId type() const noexcept { return type_; }

private:
    EventTypeId type_;
};

class ConfigTooLarge : public SimError {
public:
    using SimError::SimError;
};

// Collects the new-event requests produced by handlers while one batch
// executes. Requests are not inserted into the event set immediately; the
// engine flushes the buffer once the batch has completed, in creation
// order, validating each request against its creator's lookahead.
template <class Payload = Empty>
class RequestBuffer {
public:
    struct Pending {
        EventRequest<Payload> request;
        EventTypeId creator_type = kNoEvent;
        SimTime creator_time = 0;
        SeqNo creator_seq = 0;
    };

    // Called before each constituent handler runs so emitted requests can
    // be attributed to the event being executed.
    void begin_constituent(const BasicEvent<Payload>& creator) noexcept { creator_ = &creator; }

    void emit(EventTypeId type, SimTime time, Payload payload = {}) {
        if (creator_ == nullptr) {
            throw SimError("emit() called outside of a handler invocation");
        }
        pending_.push_back(Pending{EventRequest<Payload>{type, time, std::move(payload)},
                                   creator_->type, creator_->time, creator_->seq});
    }

    const std::vector<Pending>& pending() const noexcept { return pending_; }
    bool empty() const noexcept { return pending_.empty(); }

    void clear() noexcept {
        pending_.clear();
        creator_ = nullptr;
    }

private:
    std::vector<Pending> pending_;
    const BasicEvent<Payload>* creator_ = nullptr;
};

}  // namespace batchsim
