#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "batchsim/codec.hpp"
#include "batchsim/composer.hpp"
#include "batchsim/engine.hpp"
#include "batchsim/parametric_model.hpp"
#include "batchsim/poc_model.hpp"

using namespace batchsim;

namespace {

// Four inert event types whose only purpose is carrying four distinct
// lookahead values for window tests.
struct FourTypes {
    struct State {
        std::vector<EventTypeId> executed;
    };
    using Payload = Empty;
    static constexpr std::size_t alphabet_size = 4;

    template <std::size_t I>
    static void handle(State& s, const BasicEvent<Empty>&, RequestBuffer<Empty>&) {
        s.executed.push_back(static_cast<EventTypeId>(I + 1));
    }
};

// Claims a lookahead of 5 but schedules its child only 2 ahead.
struct Violating {
    struct State {
        int executed = 0;
    };
    using Payload = Empty;
    static constexpr std::size_t alphabet_size = 1;

    template <std::size_t I>
    static void handle(State& s, const BasicEvent<Empty>& ev, RequestBuffer<Empty>& out) {
        static_assert(I == 0);
        if (s.executed++ == 0) {
            out.emit(1, ev.time + 2);
        }
    }
};

ValidatedModel<FourTypes> four_types_model() {
    ModelDefinition<FourTypes> def;
    def.lookaheads.delta = {{1, 4}, {2, 3}, {3, 10}, {4, 1}};
    return validate_model(def);
}

ValidatedModel<PocModel> poc_model(SimTime lookahead, std::uint64_t iterations) {
    ModelDefinition<PocModel> def;
    def.lookaheads =
        LookaheadTable::uniform(PocModel::alphabet_size, static_cast<std::int64_t>(lookahead));
    def.initial_state.iterations = iterations;
    return validate_model(def);
}

template <SimulationModel M>
void schedule_all(Engine<M>& engine,
                  const std::vector<EventRequest<typename M::Payload>>& events) {
    for (const auto& req : events) {
        engine.schedule(req);
    }
}

}  // namespace

TEST_CASE("window admission is strictly below the bound") {
    CHECK(window_admits(2, 3));
    CHECK_FALSE(window_admits(3, 3));
    CHECK_FALSE(window_admits(4, 3));
}

TEST_CASE("extraction follows the dynamic lookahead window") {
    // Events (time, lookahead): (0,4) (2,3) (3,10) (5,1). The window
    // bound stays at 0+4=4 throughout, so the fourth event is excluded
    // even though three slots would remain.
    Engine<FourTypes> engine(four_types_model(),
                             {EngineConfig::Mode::batched, 4, {}});
    engine.schedule({1, 0, {}});
    engine.schedule({2, 2, {}});
    engine.schedule({3, 3, {}});
    engine.schedule({4, 5, {}});

    const auto first = engine.extract_batch();
    REQUIRE(first.events.size() == 3);
    CHECK(first.events[0].type == 1);
    CHECK(first.events[1].type == 2);
    CHECK(first.events[2].type == 3);
    const std::vector<EventTypeId> types{1, 2, 3};
    CHECK(first.id == encode(types, CodecConfig{4, 4}));

    const auto second = engine.extract_batch();
    REQUIRE(second.events.size() == 1);
    CHECK(second.events[0].type == 4);
    CHECK(engine.empty());
    CHECK_THROWS_AS(engine.extract_batch(), EmptyQueue);
}

TEST_CASE("zero lookahead degenerates to singleton batches") {
    Engine<PocModel> engine(poc_model(0, 1), {EngineConfig::Mode::batched, 4, {}});
    engine.schedule({1, 0, {}});
    engine.schedule({1, 0, {}});
    engine.schedule({2, 1, {}});
    for (int i = 0; i < 3; ++i) {
        CHECK(engine.extract_batch().events.size() == 1);
    }
}

TEST_CASE("baseline mode extracts one event at a time regardless of lookahead") {
    Engine<PocModel> engine(poc_model(100, 1), {EngineConfig::Mode::baseline, 1, {}});
    engine.schedule({1, 0, {}});
    engine.schedule({1, 1, {}});
    CHECK(engine.extract_batch().events.size() == 1);
    CHECK(engine.pending() == 1);
}

TEST_CASE("running an empty engine is a no-op") {
    Engine<PocModel> engine(poc_model(10, 1), {EngineConfig::Mode::baseline, 1, {}});
    const RunStats stats = engine.run(nullptr);
    CHECK(stats.events_executed == 0);
    CHECK(stats.batches_executed == 0);
    CHECK(stats.avg_batch_len == 0.0);
}

TEST_CASE("end_time stops execution at the bound, inclusive") {
    const auto vm = poc_model(100, 1);
    const auto table = generate_batch_table<4>(vm, CodecConfig{2, 4});
    for (const auto mode : {EngineConfig::Mode::baseline, EngineConfig::Mode::batched}) {
        EngineConfig cfg{mode, 4, SimTime{4}};
        Engine<PocModel> engine(vm, cfg);
        for (SimTime t = 0; t < 10; ++t) {
            engine.schedule({1, t, {}});
        }
        const RunStats stats =
            engine.run(mode == EngineConfig::Mode::batched ? &table : nullptr);
        CHECK(stats.events_executed == 5);  // t = 0..4
        CHECK(engine.pending() == 5);
    }
}

TEST_CASE("scheduling an unknown event type is rejected") {
    Engine<PocModel> engine(poc_model(10, 1), {EngineConfig::Mode::baseline, 1, {}});
    EventRequest<Empty> zero{0, 0, {}};
    CHECK_THROWS_AS(engine.schedule(zero), InvalidTypeId);
    EventRequest<Empty> above{3, 0, {}};
    CHECK_THROWS_AS(engine.schedule(above), InvalidTypeId);
}

TEST_CASE("direct scheduling against a creator enforces the lookahead") {
    Engine<PocModel> engine(poc_model(5, 1), {EngineConfig::Mode::baseline, 1, {}});
    const BasicEvent<Empty> creator{1, 10, 0, {}};
    EventRequest<Empty> at_bound{2, 15, {}};
    CHECK_NOTHROW(engine.schedule(at_bound, creator));  // exactly t + l is legal
    EventRequest<Empty> below{2, 14, {}};
    try {
        engine.schedule(below, creator);
        FAIL("expected LookaheadViolation");
    } catch (const LookaheadViolation& e) {
        CHECK(e.creator_type() == 1);
        CHECK(e.child_time() == 14);
        CHECK(e.earliest_legal() == 15);
    }
}

TEST_CASE("a handler emitting below its own lookahead fails in both modes") {
    ModelDefinition<Violating> def;
    def.lookaheads = LookaheadTable::uniform(1, 5);
    const auto vm = validate_model(def);
    const auto table = generate_batch_table<2>(vm, CodecConfig{1, 2});
    for (const auto mode : {EngineConfig::Mode::baseline, EngineConfig::Mode::batched}) {
        Engine<Violating> engine(vm, {mode, 2, {}});
        engine.schedule({1, 0, {}});
        CHECK_THROWS_AS(
            engine.run(mode == EngineConfig::Mode::batched ? &table : nullptr),
            LookaheadViolation);
    }
}

TEST_CASE("batched run needs a compatible table") {
    const auto vm = poc_model(10, 1);
    const auto narrow = generate_batch_table<2>(vm, CodecConfig{2, 2});
    Engine<PocModel> engine(vm, {EngineConfig::Mode::batched, 3, {}});
    engine.schedule({1, 0, {}});
    CHECK_THROWS_AS(engine.run(&narrow), SimError);
    CHECK_THROWS_AS(engine.run(nullptr), SimError);

    // A wider table serves a narrower engine: ids stay in range.
    const auto wide = generate_batch_table<4>(vm, CodecConfig{2, 4});
    CHECK_NOTHROW(engine.run(&wide));
}

TEST_CASE("batched mode with n = 1 reproduces the baseline exactly") {
    const auto vm = poc_model(1000, 3);
    const auto table = generate_batch_table<2>(vm, CodecConfig{2, 1});
    const PocWorkload w = build_workload(500, 0.4, 99, 3);

    Engine<PocModel> baseline(vm, {EngineConfig::Mode::baseline, 1, {}});
    schedule_all(baseline, w.events);
    const RunStats base_stats = baseline.run(nullptr);

    Engine<PocModel> batched(vm, {EngineConfig::Mode::batched, 1, {}});
    schedule_all(batched, w.events);
    const RunStats batch_stats = batched.run(&table);

    CHECK(baseline.state() == batched.state());
    CHECK(base_stats.events_executed == batch_stats.events_executed);
    CHECK(batch_stats.batches_executed == batch_stats.events_executed);
    CHECK(batch_stats.avg_batch_len == 1.0);
}

TEST_CASE("batched and baseline runs agree on state and execution order") {
    const ParametricWorkload<2> w = random_parametric_workload<2>(123, 60);
    const auto vm = validate_model(w.definition);
    const auto table = generate_batch_table<3>(vm, CodecConfig{2, 3});

    Engine<ParametricModel<2>> baseline(vm, {EngineConfig::Mode::baseline, 1, {}});
    schedule_all(baseline, w.events);
    const RunStats base_stats = baseline.run(nullptr);

    Engine<ParametricModel<2>> batched(vm, {EngineConfig::Mode::batched, 3, {}});
    schedule_all(batched, w.events);
    const RunStats batch_stats = batched.run(&table);

    CHECK(baseline.state() == batched.state());
    CHECK(base_stats.events_executed == batch_stats.events_executed);
    CHECK(batch_stats.batches_executed <= base_stats.batches_executed);

    // Causality: the concatenated batch trace is ordered by (time, seq).
    const auto& trace = batched.state().trace;
    REQUIRE(!trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const bool ordered = trace[i - 1].time < trace[i].time ||
                             (trace[i - 1].time == trace[i].time &&
                              trace[i - 1].seq < trace[i].seq);
        CHECK(ordered);
    }
}

TEST_CASE("a saturated-lookahead workload runs at full batch length") {
    const std::uint64_t count = 1'000'000;
    const PocWorkload w = build_workload(count, 0.5, 2024, 1);
    const auto vm = validate_model(w.definition);
    const auto table = generate_batch_table<5>(vm, CodecConfig{2, 5});

    Engine<PocModel> engine(vm, {EngineConfig::Mode::batched, 5, {}});
    schedule_all(engine, w.events);
    const RunStats stats = engine.run(&table);
    CHECK(stats.events_executed == count);
    CHECK(stats.batches_executed == count / 5);
    CHECK(stats.avg_batch_len == 5.0);
}