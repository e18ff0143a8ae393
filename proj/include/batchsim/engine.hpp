#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "batchsim/codec.hpp"
#include "batchsim/composer.hpp"
#include "batchsim/model.hpp"
#include "batchsim/types.hpp"

namespace batchsim {

// Runtime scheduler. Events are held in a future event set ordered by
// (time, seq). In batched mode the engine repeatedly extracts a causally
// safe run of events using a dynamic lookahead window, encodes the type
// sequence into a batch id and dispatches the composed entry; in baseline
// mode it dispatches events one by one through a per-type handler array.
// Both modes buffer handler-emitted requests until the batch completes
// and validate each one against its creator's lookahead when inserting.

class EmptyQueue : public SimError {
public:
    EmptyQueue() : SimError("future event set is empty") {}
};

class LookaheadViolation : public SimError {
public:
    LookaheadViolation(EventTypeId creator_type, SimTime creator_time, SeqNo creator_seq,
                       EventTypeId child_type, SimTime child_time, SimTime earliest_legal)
        : SimError("event (type " + std::to_string(creator_type) + ", t=" +
                   std::to_string(creator_time) + ", seq=" + std::to_string(creator_seq) +
                   ") scheduled a child (type " + std::to_string(child_type) + ") at t=" +
                   std::to_string(child_time) + ", before t=" + std::to_string(earliest_legal) +
                   " allowed by its lookahead"),
          creator_type_(creator_type),
          child_time_(child_time),
          earliest_legal_(earliest_legal) {}

    EventTypeId creator_type() const noexcept { return creator_type_; }
    SimTime child_time() const noexcept { return child_time_; }
    SimTime earliest_legal() const noexcept { return earliest_legal_; }

private:
    EventTypeId creator_type_;
    SimTime child_time_;
    SimTime earliest_legal_;
};

struct EngineConfig {
    enum class Mode { baseline, batched };

    Mode mode = Mode::batched;
    std::uint32_t max_batch_len = 1;     // ignored in baseline mode
    std::optional<SimTime> end_time{};   // inclusive; events past it stay unexecuted
};

struct RunStats {
    std::uint64_t events_executed = 0;
    std::uint64_t batches_executed = 0;
    double avg_batch_len = 0.0;
    std::chrono::nanoseconds wall_time{0};
};

// Window admission is strict: an event exactly at the bound is excluded,
// because a child created exactly at creator time + lookahead could tie
// with an admitted event.
constexpr bool window_admits(SimTime t_next, SimTime t_max) noexcept { return t_next < t_max; }

namespace detail {

template <SimulationModel M, std::size_t I>
void invoke_single(typename M::State& state, const BasicEvent<typename M::Payload>& ev,
                   RequestBuffer<typename M::Payload>& out) {
    M::template handle<I>(state, ev, out);
}

template <SimulationModel M, std::size_t... I>
constexpr auto make_single_dispatch(std::index_sequence<I...>) {
    using Fn = void (*)(typename M::State&, const BasicEvent<typename M::Payload>&,
                        RequestBuffer<typename M::Payload>&);
    return std::array<Fn, sizeof...(I)>{&invoke_single<M, I>...};
}

}  // namespace detail

template <SimulationModel M>
class Engine {
public:
    using State = typename M::State;
    using Payload = typename M::Payload;
    using Ev = BasicEvent<Payload>;
    using Request = EventRequest<Payload>;

    Engine(ValidatedModel<M> model, EngineConfig cfg)
        : model_(std::move(model)), cfg_(cfg), state_(model_.initial_state()) {
        if (cfg_.mode == EngineConfig::Mode::batched && cfg_.max_batch_len == 0) {
            throw SimError("batched mode needs max batch length >= 1");
        }
        batch_.reserve(effective_batch_len());
    }

    // Insert an event with a fresh sequence number. The overload with a
    // creator enforces the lookahead contract: a child may never be
    // scheduled before creator time + creator lookahead.
    void schedule(const Request& req) { insert(req); }

    void schedule(const Request& req, const Ev& creator) {
        check_lookahead(req.type, req.time, creator.type, creator.time, creator.seq);
        insert(req);
    }

    struct ExtractedBatch {
        std::vector<Ev> events;  // extraction order
        BatchId id = 0;
    };

    // Pops the earliest event unconditionally, then keeps popping while the
    // next event lies strictly inside the dynamic lookahead window and the
    // batch is shorter than the configured maximum. The window bound is the
    // running minimum of time + lookahead over the events already admitted,
    // updated after each admission.
    ExtractedBatch extract_batch() {
        if (fes_.empty()) {
            throw EmptyQueue();
        }
        const BatchId id = extract_into_buffer(effective_batch_len());
        return ExtractedBatch{batch_, id};
    }

    // Drains the future event set (or stops past end_time), dispatching
    // batches through the composed table. Baseline mode ignores the table
    // and dispatches single events through the per-type handler array.
    // Wall time covers the dispatch loop only.
    RunStats run(const BatchTable<M>* table) {
        RunStats stats;
        const bool batched = cfg_.mode == EngineConfig::Mode::batched;
        if (batched) {
            if (table == nullptr) {
                throw SimError("batched mode needs a generated batch table");
            }
            if (table->config().alphabet_size != M::alphabet_size) {
                throw SimError("batch table was generated for a different alphabet");
            }
            if (table->config().max_batch_len < cfg_.max_batch_len) {
                throw SimError("batch table max length " +
                               std::to_string(table->config().max_batch_len) +
                               " is below the engine's " + std::to_string(cfg_.max_batch_len));
            }
        }

        const auto start = std::chrono::steady_clock::now();
        if (batched) {
            const std::uint32_t n = cfg_.max_batch_len;
            while (!fes_.empty() && !past_end(fes_.top().time)) {
                const BatchId id = extract_into_buffer(n);
                table->entry(id)(state_, batch_.data(), requests_);
                flush_requests();
                stats.events_executed += batch_.size();
                ++stats.batches_executed;
            }
        } else {
            while (!fes_.empty() && !past_end(fes_.top().time)) {
                const Ev ev = fes_.top();
                fes_.pop();
                requests_.begin_constituent(ev);
                per_type_[ev.type - 1](state_, ev, requests_);
                flush_requests();
                ++stats.events_executed;
                ++stats.batches_executed;
            }
        }
        stats.wall_time =
            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
        if (stats.batches_executed != 0) {
            stats.avg_batch_len =
                static_cast<double>(stats.events_executed) / static_cast<double>(stats.batches_executed);
        }
        return stats;
    }

    const State& state() const noexcept { return state_; }
    State& state() noexcept { return state_; }
    bool empty() const noexcept { return fes_.empty(); }
    std::size_t pending() const noexcept { return fes_.size(); }
    const ValidatedModel<M>& model() const noexcept { return model_; }

private:
    struct After {
        bool operator()(const Ev& a, const Ev& b) const noexcept {
            return a.time > b.time || (a.time == b.time && a.seq > b.seq);
        }
    };

    // Classic one-by-one dispatch: one function pointer per event type.
    static constexpr auto per_type_ =
        detail::make_single_dispatch<M>(std::make_index_sequence<M::alphabet_size>{});

    std::uint32_t effective_batch_len() const noexcept {
        return cfg_.mode == EngineConfig::Mode::batched ? cfg_.max_batch_len : 1;
    }

    bool past_end(SimTime t) const noexcept { return cfg_.end_time && t > *cfg_.end_time; }

    void insert(const Request& req) {
        if (req.type == kNoEvent || req.type > M::alphabet_size) {
            throw InvalidTypeId(req.type, M::alphabet_size);
        }
        fes_.push(Ev{req.type, req.time, next_seq_++, req.payload});
    }

    void check_lookahead(EventTypeId child_type, SimTime child_time, EventTypeId creator_type,
                         SimTime creator_time, SeqNo creator_seq) const {
        const SimTime earliest = saturating_add(creator_time, model_.lookahead(creator_type));
        if (child_time < earliest) {
            throw LookaheadViolation(creator_type, creator_time, creator_seq, child_type,
                                     child_time, earliest);
        }
    }

    // Fills batch_ and returns the Horner-accumulated id: the event at
    // batch position k contributes type * base^k.
    BatchId extract_into_buffer(std::uint32_t max_len) {
        const std::uint64_t base = std::uint64_t{M::alphabet_size} + 1;
        batch_.clear();
        Ev ev = fes_.top();
        fes_.pop();
        BatchId id = ev.type;
        std::uint64_t place = base;
        SimTime t_max = saturating_add(ev.time, model_.lookahead(ev.type));
        batch_.push_back(ev);
        while (batch_.size() < max_len && !fes_.empty()) {
            const Ev& next = fes_.top();
            if (!window_admits(next.time, t_max) || past_end(next.time)) {
                break;
            }
            id += std::uint64_t{next.type} * place;
            place *= base;
            t_max = std::min(t_max, saturating_add(next.time, model_.lookahead(next.type)));
            batch_.push_back(next);
            fes_.pop();
        }
        return id;
    }

    void flush_requests() {
        if (requests_.empty()) {
            return;
        }
        for (const auto& p : requests_.pending()) {
            check_lookahead(p.request.type, p.request.time, p.creator_type, p.creator_time,
                            p.creator_seq);
            insert(p.request);
        }
        requests_.clear();
    }

    ValidatedModel<M> model_;
    EngineConfig cfg_;
    State state_;
    std::priority_queue<Ev, std::vector<Ev>, After> fes_;
    std::vector<Ev> batch_;
    RequestBuffer<Payload> requests_;
    SeqNo next_seq_ = 0;
};

}  // namespace batchsim
