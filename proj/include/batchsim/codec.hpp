#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "batchsim/types.hpp"

namespace batchsim {

// Batch identifiers form a positional number system in base |alphabet|+1.
// Digit 0 is the reserved "no event" mark; digit d >= 1 names event type d.
// The digit at place value base^k is the type of the k-th event executed,
// so the least significant digit is the earliest event and id 0 encodes
// the empty batch.

using BatchId = std::uint64_t;

class SequenceTooLong : public SimError {
public:
    SequenceTooLong(std::size_t len, std::uint32_t max_len)
        : SimError("sequence of length " + std::to_string(len) +
                   " exceeds maximum batch length " + std::to_string(max_len)) {}
};

class IdOutOfRange : public SimError {
public:
    IdOutOfRange(BatchId id, BatchId max)
        : SimError("batch id " + std::to_string(id) + " outside [0, " + std::to_string(max) + "]") {}
};

struct CodecConfig {
    std::uint32_t alphabet_size = 1;  // number of real event types
    std::uint32_t max_batch_len = 1;

    constexpr std::uint64_t base() const noexcept { return std::uint64_t{alphabet_size} + 1; }
};

namespace detail {

constexpr std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b) {
        throw ConfigTooLarge("batch id space overflows 64 bits");
    }
    return a * b;
}

constexpr std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b) {
        throw ConfigTooLarge("batch count overflows 64 bits");
    }
    return a + b;
}

// Sum of radix^i for i in 1..len, with overflow detection.
constexpr std::uint64_t geometric_id_count(std::uint64_t radix, std::uint32_t len) {
    std::uint64_t total = 0;
    std::uint64_t power = 1;
    for (std::uint32_t i = 0; i < len; ++i) {
        power = checked_mul(power, radix);
        total = checked_add(total, power);
    }
    return total;
}

constexpr void require_valid(const CodecConfig& cfg) {
    if (cfg.alphabet_size == 0) {
        throw EmptyAlphabet();
    }
    if (cfg.max_batch_len == 0) {
        throw SimError("max batch length must be at least 1");
    }
}

}  // namespace detail

// Number of non-empty batches the id space holds, including the redundant
// ones whose digit strings contain interior zeros. Id 0 (the empty batch)
// is not counted.
constexpr std::uint64_t total_batch_count(const CodecConfig& cfg) {
    detail::require_valid(cfg);
    return detail::geometric_id_count(cfg.base(), cfg.max_batch_len);
}

// Number of ids whose digit strings are free of the zero digit; these are
// exactly the ids the scheduler can produce.
constexpr std::uint64_t reachable_batch_count(const CodecConfig& cfg) {
    detail::require_valid(cfg);
    return detail::geometric_id_count(cfg.alphabet_size, cfg.max_batch_len);
}

struct RedundancyStats {
    std::uint64_t redundant = 0;
    double fraction = 0.0;  // redundant / total
};

constexpr RedundancyStats redundant_batch_count(const CodecConfig& cfg) {
    const std::uint64_t total = total_batch_count(cfg);
    const std::uint64_t redundant = total - reachable_batch_count(cfg);
    return RedundancyStats{redundant, static_cast<double>(redundant) / static_cast<double>(total)};
}

inline BatchId encode(std::span<const EventTypeId> seq, const CodecConfig& cfg) {
    total_batch_count(cfg);  // rejects configs whose id space overflows 64 bits
    if (seq.size() > cfg.max_batch_len) {
        throw SequenceTooLong(seq.size(), cfg.max_batch_len);
    }
    BatchId id = 0;
    std::uint64_t place = 1;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        if (seq[k] == kNoEvent || seq[k] > cfg.alphabet_size) {
            throw InvalidTypeId(seq[k], cfg.alphabet_size);
        }
        id += std::uint64_t{seq[k]} * place;
        place *= cfg.base();
    }
    return id;
}

// Digit extraction, least significant first. Zero digits below the most
// significant nonzero digit mark "no event" and are skipped, so redundant
// ids decode to the same sequence as their zero-free projection.
inline std::vector<EventTypeId> decode(BatchId id, const CodecConfig& cfg) {
    const BatchId max_id = total_batch_count(cfg);
    if (id > max_id) {
        throw IdOutOfRange(id, max_id);
    }
    std::vector<EventTypeId> seq;
    const std::uint64_t base = cfg.base();
    while (id != 0) {
        const auto digit = static_cast<EventTypeId>(id % base);
        id /= base;
        if (digit != kNoEvent) {
            seq.push_back(digit);
        }
    }
    return seq;
}

// True iff the scheduler can produce this id: the digit string contains no
// zero below its most significant nonzero digit, equivalently
// encode(decode(id)) == id and id > 0.
inline bool is_reachable(BatchId id, const CodecConfig& cfg) {
    const BatchId max_id = total_batch_count(cfg);
    if (id > max_id) {
        throw IdOutOfRange(id, max_id);
    }
    if (id == 0) {
        return false;
    }
    const std::uint64_t base = cfg.base();
    while (id != 0) {
        if (id % base == 0) {
            return false;  // interior "no event" digit
        }
        id /= base;
    }
    return true;
}

}  // namespace batchsim
