#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "batchsim/codec.hpp"
#include "batchsim/composer.hpp"
#include "batchsim/poc_model.hpp"

using namespace batchsim;

namespace {

// Non-commutative state updates, so any reordering or dropped
// constituent changes the result; type 2 also emits a child to exercise
// request attribution inside composed entries.
struct MixModel {
    struct State {
        std::uint64_t x = 1;
        std::vector<EventTypeId> trace;
    };
    using Payload = Empty;
    static constexpr std::size_t alphabet_size = 3;

    template <std::size_t I>
    static void handle(State& s, const BasicEvent<Empty>& ev, RequestBuffer<Empty>& out) {
        if constexpr (I == 0) {
            s.x = s.x * 3 + 1;
        } else if constexpr (I == 1) {
            s.x = s.x * s.x + 2;
            out.emit(1, ev.time + 2);
        } else {
            s.x = s.x * 5 + ev.time;
        }
        s.trace.push_back(static_cast<EventTypeId>(I + 1));
    }
};

ValidatedModel<MixModel> mix_model() {
    ModelDefinition<MixModel> def;
    def.lookaheads = LookaheadTable::uniform(MixModel::alphabet_size, 2);
    return validate_model(def);
}

ValidatedModel<PocModel> poc_model(std::uint64_t iterations) {
    ModelDefinition<PocModel> def;
    def.lookaheads = LookaheadTable::uniform(PocModel::alphabet_size, 100);
    def.initial_state.iterations = iterations;
    return validate_model(def);
}

std::vector<BasicEvent<Empty>> events_for(const std::vector<EventTypeId>& types) {
    std::vector<BasicEvent<Empty>> events;
    for (std::size_t k = 0; k < types.size(); ++k) {
        events.push_back({types[k], SimTime{k}, SeqNo{k}, {}});
    }
    return events;
}

// One-by-one reference execution of the same event sequence.
void oracle(MixModel::State& state, const std::vector<BasicEvent<Empty>>& events,
            RequestBuffer<Empty>& out) {
    for (const auto& ev : events) {
        out.begin_constituent(ev);
        switch (ev.type) {
            case 1: MixModel::handle<0>(state, ev, out); break;
            case 2: MixModel::handle<1>(state, ev, out); break;
            default: MixModel::handle<2>(state, ev, out); break;
        }
    }
}

}  // namespace

TEST_CASE("table holds one entry per id including the empty batch") {
    const auto table = generate_batch_table<2>(poc_model(3), CodecConfig{2, 2});
    CHECK(table.size() == 13);  // ids 0..12
    CHECK(table.config().alphabet_size == 2);
    CHECK(table.config().max_batch_len == 2);
    const GenerationStats stats = report_generation_stats(table);
    CHECK(stats.total == 12);
    CHECK(stats.reachable == 6);
    CHECK(stats.redundant == 6);
}

TEST_CASE("entry 0 leaves the state untouched") {
    const auto table = generate_batch_table<2>(poc_model(3), CodecConfig{2, 2});
    PocState state{42, 3};
    RequestBuffer<Empty> buf;
    table.entry(0)(state, nullptr, buf);
    CHECK(state.sum == 42);
    CHECK(buf.empty());
}

TEST_CASE("composed entries execute constituents in digit order") {
    const auto table = generate_batch_table<2>(poc_model(3), CodecConfig{2, 2});
    RequestBuffer<Empty> buf;

    SECTION("id 5 = Set then Increment") {
        PocState state{0, 3};
        const auto events = events_for({2, 1});
        table.entry(5)(state, events.data(), buf);
        CHECK(state.sum == 87);  // 10 -> 21 -> 43 -> 87
    }
    SECTION("id 7 = Increment then Set: the loop's work is dead") {
        PocState state{0, 3};
        const auto events = events_for({1, 2});
        table.entry(7)(state, events.data(), buf);
        CHECK(state.sum == PocModel::set_value);
    }
    SECTION("id 1 = a lone Increment") {
        PocState state{0, 3};
        const auto events = events_for({1});
        table.entry(1)(state, events.data(), buf);
        CHECK(state.sum == 7);
    }
}

TEST_CASE("a redundant id behaves exactly like its zero-free projection") {
    const auto table = generate_batch_table<2>(poc_model(4), CodecConfig{2, 2});
    RequestBuffer<Empty> buf;
    // id 3 = digits (0, 1); its projection is id 1 = [Increment].
    PocState via_redundant{5, 4};
    PocState via_projection{5, 4};
    const auto events = events_for({1});
    table.entry(3)(via_redundant, events.data(), buf);
    table.entry(1)(via_projection, events.data(), buf);
    CHECK(via_redundant == via_projection);
}

TEST_CASE("every composed entry matches one-by-one execution") {
    const CodecConfig cfg{MixModel::alphabet_size, 3};
    const auto table = generate_batch_table<3>(mix_model(), cfg);
    REQUIRE(table.size() == total_batch_count(cfg) + 1);

    for (BatchId id = 0; id <= total_batch_count(cfg); ++id) {
        const auto types = decode(id, cfg);
        const auto events = events_for(types);

        MixModel::State composed_state;
        RequestBuffer<Empty> composed_buf;
        table.entry(id)(composed_state, events.data(), composed_buf);

        MixModel::State oracle_state;
        RequestBuffer<Empty> oracle_buf;
        oracle(oracle_state, events, oracle_buf);

        CHECK(composed_state.x == oracle_state.x);
        CHECK(composed_state.trace == oracle_state.trace);
        REQUIRE(composed_buf.pending().size() == oracle_buf.pending().size());
        for (std::size_t i = 0; i < composed_buf.pending().size(); ++i) {
            const auto& a = composed_buf.pending()[i];
            const auto& b = oracle_buf.pending()[i];
            CHECK(a.request.type == b.request.type);
            CHECK(a.request.time == b.request.time);
            CHECK(a.creator_type == b.creator_type);
            CHECK(a.creator_time == b.creator_time);
            CHECK(a.creator_seq == b.creator_seq);
        }
    }
}

TEST_CASE("children emitted inside a batch carry their constituent's identity") {
    const auto table = generate_batch_table<3>(mix_model(), CodecConfig{3, 3});
    // [2, 2, 1]: both type-2 constituents emit one child each.
    const std::vector<EventTypeId> types{2, 2, 1};
    const BatchId id = encode(types, table.config());
    auto events = events_for(types);
    events[1].time = 1;
    events[1].seq = 9;

    MixModel::State state;
    RequestBuffer<Empty> buf;
    table.entry(id)(state, events.data(), buf);
    REQUIRE(buf.pending().size() == 2);
    CHECK(buf.pending()[0].creator_seq == 0);
    CHECK(buf.pending()[1].creator_seq == 9);
    CHECK(buf.pending()[1].creator_time == 1);
    CHECK(buf.pending()[1].request.time == 3);
}

TEST_CASE("lookup outside the composed id space fails") {
    const auto table = generate_batch_table<2>(poc_model(1), CodecConfig{2, 2});
    CHECK_NOTHROW(table.entry(12));
    CHECK_THROWS_AS(table.entry(13), MissingBatchEntry);
}

TEST_CASE("generation rejects configurations it cannot serve") {
    const auto vm = poc_model(1);
    SECTION("alphabet mismatch") {
        CHECK_THROWS_AS(generate_batch_table<2>(vm, CodecConfig{3, 2}), SimError);
    }
    SECTION("window longer than the composed-ahead bound") {
        CHECK_THROWS_AS(generate_batch_table<2>(vm, CodecConfig{2, 3}), ConfigTooLarge);
    }
    SECTION("entry cap") {
        CHECK_THROWS_AS(generate_batch_table<2>(vm, CodecConfig{2, 2}, GenerationLimits{10}),
                        ConfigTooLarge);
    }
    SECTION("zero-length window") {
        CHECK_THROWS_AS(generate_batch_table<2>(vm, CodecConfig{2, 0}), SimError);
    }
}