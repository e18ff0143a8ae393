#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

#include "batchsim/codec.hpp"
#include "batchsim/model.hpp"
#include "batchsim/types.hpp"

namespace batchsim {

// Ahead-of-runtime batch composition. For every id in [0, B] a dedicated
// entry function is instantiated whose body is the in-order concatenation
// of the constituent handler bodies. Each constituent is a direct call to
// a statically known handler, so the optimizer processes the whole batch
// as one contiguous procedure and can eliminate work across event
// boundaries. There are no indirect calls inside an entry; the only
// indirection is the per-batch dispatch through the table itself.

template <SimulationModel M>
using BatchEntryFn = void (*)(typename M::State&, const BasicEvent<typename M::Payload>*,
                              RequestBuffer<typename M::Payload>&);

class MissingBatchEntry : public SimError {
public:
    explicit MissingBatchEntry(BatchId id)
        : SimError("no composed entry for batch id " + std::to_string(id)) {}
};

namespace detail {

template <std::size_t MaxLen>
struct DecodedDigits {
    std::array<std::size_t, MaxLen> handler_index{};  // type id - 1, execution order
    std::size_t len = 0;
};

// Same digit extraction as decode(), evaluated at compile time. Zero
// digits are skipped, so a redundant id shares the entry semantics of its
// zero-free projection.
template <BatchId Id, std::uint64_t Base, std::size_t MaxLen>
constexpr DecodedDigits<MaxLen> decode_digits() {
    DecodedDigits<MaxLen> out{};
    std::uint64_t v = Id;
    while (v != 0) {
        const std::uint64_t digit = v % Base;
        v /= Base;
        if (digit != 0) {
            out.handler_index[out.len++] = static_cast<std::size_t>(digit - 1);
        }
    }
    return out;
}

template <SimulationModel M, std::size_t MaxLen, BatchId Id>
struct BatchEntry {
    static constexpr auto digits = decode_digits<Id, M::alphabet_size + 1, MaxLen>();

    using State = typename M::State;
    using Ev = BasicEvent<typename M::Payload>;
    using Buffer = RequestBuffer<typename M::Payload>;

    static void invoke(State& state, const Ev* events, Buffer& out) {
        run(state, events, out, std::make_index_sequence<digits.len>{});
    }

private:
    template <std::size_t... K>
    static void run(State& state, const Ev* events, Buffer& out, std::index_sequence<K...>) {
        // Constituent k handles the event at batch position k.
        ((out.begin_constituent(events[K]),
          M::template handle<digits.handler_index[K]>(state, events[K], out)),
         ...);
        (void)state;
        (void)events;
        (void)out;
    }
};

template <SimulationModel M, std::size_t MaxLen, BatchId... Ids>
constexpr std::array<BatchEntryFn<M>, sizeof...(Ids)> make_entries(
    std::integer_sequence<BatchId, Ids...>) {
    return {&BatchEntry<M, MaxLen, Ids>::invoke...};
}

// One statically composed table per (model, maximum batch length) pair.
template <SimulationModel M, std::size_t MaxLen>
struct StaticTable {
    static constexpr CodecConfig cfg{static_cast<std::uint32_t>(M::alphabet_size),
                                     static_cast<std::uint32_t>(MaxLen)};
    static constexpr std::uint64_t entry_count = total_batch_count(cfg) + 1;
    static constexpr auto entries =
        make_entries<M, MaxLen>(std::make_integer_sequence<BatchId, entry_count>{});
};

}  // namespace detail

// Immutable view of the composed entries for one (model, config) pair.
// Entry 0 is the empty batch and leaves the state untouched; the scheduler
// never dispatches it, but keeping it makes the id space dense.
template <SimulationModel M>
class BatchTable {
public:
    BatchTable(CodecConfig cfg, std::span<const BatchEntryFn<M>> entries)
        : cfg_(cfg), entries_(entries) {}

    const CodecConfig& config() const noexcept { return cfg_; }
    std::size_t size() const noexcept { return entries_.size(); }

    BatchEntryFn<M> entry(BatchId id) const {
        if (id >= entries_.size()) {
            throw MissingBatchEntry(id);
        }
        return entries_[id];
    }

private:
    CodecConfig cfg_;
    std::span<const BatchEntryFn<M>> entries_;
};

struct GenerationLimits {
    std::uint64_t max_entries = 100000;
};

// Selects the statically composed table matching a runtime configuration.
// MaxLen bounds which lengths were composed ahead of time; asking beyond
// it, or beyond the entry cap, fails with ConfigTooLarge rather than
// falling back to some uncomposed dispatch path.
template <std::size_t MaxLen = 6, SimulationModel M>
BatchTable<M> generate_batch_table(const ValidatedModel<M>&, CodecConfig cfg,
                                   GenerationLimits limits = {}) {
    static_assert(MaxLen >= 1);
    if (cfg.alphabet_size != M::alphabet_size) {
        throw SimError("config alphabet size " + std::to_string(cfg.alphabet_size) +
                       " does not match the model's " + std::to_string(M::alphabet_size));
    }
    const std::uint64_t entries = total_batch_count(cfg) + 1;
    if (entries > limits.max_entries) {
        throw ConfigTooLarge("generation would compose " + std::to_string(entries) +
                             " entries, above the cap of " + std::to_string(limits.max_entries));
    }
    if (cfg.max_batch_len > MaxLen) {
        throw ConfigTooLarge("batch length " + std::to_string(cfg.max_batch_len) +
                             " exceeds the composed-ahead bound " + std::to_string(MaxLen));
    }

    BatchTable<M> table(cfg, {});
    auto probe = [&]<std::size_t... N>(std::index_sequence<N...>) {
        ((cfg.max_batch_len == N + 1
              ? (void)(table = BatchTable<M>(detail::StaticTable<M, N + 1>::cfg,
                                             detail::StaticTable<M, N + 1>::entries))
              : (void)0),
         ...);
    };
    probe(std::make_index_sequence<MaxLen>{});
    return table;
}

struct GenerationStats {
    std::uint64_t total = 0;      // composed non-empty entries
    std::uint64_t reachable = 0;  // ids the scheduler can produce
    std::uint64_t redundant = 0;  // entries aliasing their zero-free projection
};

// Walks the actual id space of a table; totals agree with the codec's
// closed-form counts.
template <SimulationModel M>
GenerationStats report_generation_stats(const BatchTable<M>& table) {
    GenerationStats stats;
    stats.total = table.size() - 1;
    for (BatchId id = 1; id < table.size(); ++id) {
        if (is_reachable(id, table.config())) {
            ++stats.reachable;
        }
    }
    stats.redundant = stats.total - stats.reachable;
    return stats;
}

}  // namespace batchsim
