#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "batchsim/analytics.hpp"
#include "batchsim/codec.hpp"
#include "batchsim/composer.hpp"
#include "batchsim/engine.hpp"
#include "batchsim/model.hpp"
#include "batchsim/poc_model.hpp"
#include "batchsim/types.hpp"

// Benchmark harness behind the CLI: run the Increment/Set experiment and
// report CSV, print batch-count tables, evaluate the speedup bound.
// Everything probability-flavored here is parameterized by p_set (the
// cheap overwrite type); the costly probability fed to the analytics is
// 1 - p_set.

namespace batchsim::bench {

enum class RunMode { baseline, batched, both };

inline std::optional<RunMode> parse_mode(std::string_view name) {
    if (name == "baseline") {
        return RunMode::baseline;
    }
    if (name == "batched") {
        return RunMode::batched;
    }
    if (name == "both") {
        return RunMode::both;
    }
    return std::nullopt;
}

struct BenchConfig {
    std::uint32_t max_batch_len = 1;
    double p_set = 0.5;
    std::uint64_t events = 1;
    std::uint64_t iterations = 1'000'000;
    std::uint32_t runs = 1;
    std::uint64_t seed = 0;
    RunMode mode = RunMode::both;
    std::string out{};  // CSV destination; empty means stdout-summary only
};

// One CSV row. mode=both produces two rows per run sharing the speedup
// value; a row whose paired mode was not run carries speedup 0.
struct BenchRecord {
    std::uint32_t n = 1;
    double p_set = 0.5;
    std::uint64_t events = 0;
    std::uint64_t iterations = 0;
    std::uint32_t run = 0;
    std::uint64_t seed = 0;
    std::string mode;
    std::uint64_t wall_time_ns = 0;
    double speedup = 0.0;
    double avg_batch_len = 0.0;
    std::uint64_t final_sum = 0;
};

inline std::string csv_header() {
    return "n,p_set,events,iterations,run,seed,mode,wall_time_ns,speedup,avg_batch_len,final_sum";
}

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
    os << csv_header() << '\n';
    for (const auto& r : records) {
        os << r.n << ',' << detail::format_double(r.p_set) << ',' << r.events << ','
           << r.iterations << ',' << r.run << ',' << r.seed << ',' << r.mode << ','
           << r.wall_time_ns << ',' << detail::format_double(r.speedup) << ','
           << detail::format_double(r.avg_batch_len) << ',' << r.final_sum << '\n';
    }
}

struct BenchSummary {
    std::uint32_t runs = 0;
    RunMode mode = RunMode::both;
    double mean_baseline_ns = 0.0;   // 0 when baseline was not run
    double mean_batched_ns = 0.0;    // 0 when batched was not run
    double mean_speedup = 0.0;       // 0 unless mode == both
    double mean_avg_batch_len = 0.0; // over batched runs (1 for baseline-only)
    AnalyticValue s_max{};           // bound for (n, p_costly = 1 - p_set)
};

struct BenchResult {
    std::vector<BenchRecord> records;
    BenchSummary summary;
};

// Runs the proof-of-concept experiment: per run, build a fresh seeded
// workload, execute it in the requested mode(s), and emit one record per
// execution. Both modes of a run share the workload, and the timing
// covers the engine loop only. One untimed warm-up execution per mode
// precedes the timed runs. MaxBatchLen bounds the compiled-in batch
// tables; asking for a longer window fails with ConfigTooLarge.
template <std::size_t MaxBatchLen = 6>
BenchResult cmd_run(const BenchConfig& cfg) {
    if (cfg.runs == 0) {
        throw SimError("runs must be >= 1");
    }
    if (cfg.events == 0) {
        throw SimError("events must be >= 1");
    }
    if (cfg.max_batch_len == 0) {
        throw SimError("max batch length must be >= 1");
    }
    const bool want_base = cfg.mode != RunMode::batched;
    const bool want_batch = cfg.mode != RunMode::baseline;

    // Table generation happens once, outside all timing.
    std::optional<BatchTable<PocModel>> table;
    if (want_batch) {
        const PocWorkload probe = build_workload(1, cfg.p_set, cfg.seed, cfg.iterations);
        table = generate_batch_table<MaxBatchLen>(
            validate_model(probe.definition),
            CodecConfig{PocModel::alphabet_size, cfg.max_batch_len});
    }

    auto execute = [&](const PocWorkload& w, EngineConfig::Mode m) {
        EngineConfig ec;
        ec.mode = m;
        ec.max_batch_len = cfg.max_batch_len;
        Engine<PocModel> engine(validate_model(w.definition), ec);
        for (const auto& req : w.events) {
            engine.schedule(req);
        }
        const RunStats stats =
            engine.run(m == EngineConfig::Mode::batched ? &*table : nullptr);
        return std::pair{stats, engine.state().sum};
    };

    {
        const PocWorkload warm = build_workload(cfg.events, cfg.p_set, cfg.seed, cfg.iterations);
        if (want_base) {
            (void)execute(warm, EngineConfig::Mode::baseline);
        }
        if (want_batch) {
            (void)execute(warm, EngineConfig::Mode::batched);
        }
    }

    BenchResult result;
    double sum_base = 0.0;
    double sum_batch = 0.0;
    double sum_speedup = 0.0;
    double sum_avg_len = 0.0;
    for (std::uint32_t run = 0; run < cfg.runs; ++run) {
        const std::uint64_t run_seed = cfg.seed + run;
        const PocWorkload w = build_workload(cfg.events, cfg.p_set, run_seed, cfg.iterations);

        std::optional<std::pair<RunStats, std::uint64_t>> base;
        std::optional<std::pair<RunStats, std::uint64_t>> batch;
        if (want_base) {
            base = execute(w, EngineConfig::Mode::baseline);
        }
        if (want_batch) {
            batch = execute(w, EngineConfig::Mode::batched);
        }

        double speedup = 0.0;
        if (base && batch) {
            if (base->second != batch->second) {
                throw SimError("baseline and batched runs disagree on the final sum");
            }
            const auto base_ns = std::max<std::int64_t>(base->first.wall_time.count(), 1);
            const auto batch_ns = std::max<std::int64_t>(batch->first.wall_time.count(), 1);
            speedup = static_cast<double>(base_ns) / static_cast<double>(batch_ns);
            sum_speedup += speedup;
        }

        auto emit = [&](const char* mode, const std::pair<RunStats, std::uint64_t>& outcome) {
            BenchRecord rec;
            rec.n = cfg.max_batch_len;
            rec.p_set = cfg.p_set;
            rec.events = cfg.events;
            rec.iterations = cfg.iterations;
            rec.run = run;
            rec.seed = run_seed;
            rec.mode = mode;
            rec.wall_time_ns = static_cast<std::uint64_t>(outcome.first.wall_time.count());
            rec.speedup = speedup;
            rec.avg_batch_len = outcome.first.avg_batch_len;
            rec.final_sum = outcome.second;
            result.records.push_back(std::move(rec));
        };
        if (base) {
            emit("baseline", *base);
            sum_base += static_cast<double>(base->first.wall_time.count());
        }
        if (batch) {
            emit("batched", *batch);
            sum_batch += static_cast<double>(batch->first.wall_time.count());
            sum_avg_len += batch->first.avg_batch_len;
        } else if (base) {
            sum_avg_len += base->first.avg_batch_len;
        }
    }

    const double runs = static_cast<double>(cfg.runs);
    result.summary.runs = cfg.runs;
    result.summary.mode = cfg.mode;
    result.summary.mean_baseline_ns = want_base ? sum_base / runs : 0.0;
    result.summary.mean_batched_ns = want_batch ? sum_batch / runs : 0.0;
    result.summary.mean_speedup = (want_base && want_batch) ? sum_speedup / runs : 0.0;
    result.summary.mean_avg_batch_len = sum_avg_len / runs;
    result.summary.s_max = max_speedup(SpeedupModel{cfg.max_batch_len, 1.0 - cfg.p_set});
    return result;
}

inline std::string format_summary(const BenchConfig& cfg, const BenchSummary& s) {
    std::ostringstream os;
    os << "n=" << cfg.max_batch_len << " p_set=" << detail::format_double(cfg.p_set)
       << " events=" << cfg.events << " iterations=" << cfg.iterations << " runs=" << s.runs
       << '\n';
    if (s.mean_baseline_ns > 0.0) {
        os << "mean baseline wall time: " << detail::format_double(s.mean_baseline_ns) << " ns\n";
    }
    if (s.mean_batched_ns > 0.0) {
        os << "mean batched wall time:  " << detail::format_double(s.mean_batched_ns) << " ns\n";
    }
    os << "mean avg batch length:   " << detail::format_double(s.mean_avg_batch_len) << '\n';
    if (s.mean_speedup > 0.0) {
        os << "mean speedup:            " << detail::format_double(s.mean_speedup) << '\n';
    }
    os << "analytic s_max:          " << detail::format_double(s.s_max.value)
       << (s.s_max.degenerate_limit ? " (limit value)" : "") << '\n';
    return os.str();
}

struct CountsReport {
    CodecConfig config{};
    BatchId total = 0;
    BatchId reachable = 0;
    RedundancyStats redundancy{};
    bool composed_checked = false;
    GenerationStats generated{};  // meaningful when composed_checked
};

namespace detail {

// Minimal model for exercising table generation at arbitrary alphabet
// sizes: handlers just fold the event into a digest, so the composed
// entries stay cheap to compile.
template <std::size_t K>
struct CountModel {
    struct State {
        std::uint64_t digest = 0;
    };
    using Payload = Empty;
    static constexpr std::size_t alphabet_size = K;

    template <std::size_t I>
    static void handle(State& s, const BasicEvent<Empty>& ev, RequestBuffer<Empty>&) {
        s.digest = s.digest * 31 + I * 7 + ev.time;
    }
};

template <std::size_t K, std::size_t MaxLen>
GenerationStats composed_stats(CodecConfig cfg) {
    ModelDefinition<CountModel<K>> def;
    def.lookaheads = LookaheadTable::uniform(K, 1);
    const auto table = generate_batch_table<MaxLen>(validate_model(def), cfg);
    return report_generation_stats(table);
}

}  // namespace detail

// Prints the batch-count table for a configuration from the closed-form
// codec counts. With `composed`, additionally generates the real batch
// table (bounded by the MaxTypes x MaxLen compiled-in grid) and checks
// that walking it reproduces the formula counts.
template <std::size_t MaxTypes = 5, std::size_t MaxLen = 5>
CountsReport cmd_counts(std::size_t alphabet_size, std::uint32_t max_batch_len,
                        bool composed = false) {
    const CodecConfig cfg{static_cast<std::uint32_t>(alphabet_size), max_batch_len};
    CountsReport rep;
    rep.config = cfg;
    rep.total = total_batch_count(cfg);
    rep.reachable = reachable_batch_count(cfg);
    rep.redundancy = redundant_batch_count(cfg);
    if (!composed) {
        return rep;
    }
    if (alphabet_size > MaxTypes) {
        throw ConfigTooLarge("composed check compiled for at most " + std::to_string(MaxTypes) +
                             " event types, got " + std::to_string(alphabet_size));
    }
    auto probe = [&]<std::size_t... I>(std::index_sequence<I...>) {
        ((alphabet_size == I + 1
              ? (void)(rep.generated = detail::composed_stats<I + 1, MaxLen>(cfg))
              : (void)0),
         ...);
    };
    probe(std::make_index_sequence<MaxTypes>{});
    if (rep.generated.total != rep.total || rep.generated.reachable != rep.reachable ||
        rep.generated.redundant != rep.redundancy.redundant) {
        throw SimError("generated table counts disagree with the codec formulas");
    }
    rep.composed_checked = true;
    return rep;
}

inline std::string format_counts(const CountsReport& r) {
    std::ostringstream os;
    os << "alphabet=" << r.config.alphabet_size << " n=" << r.config.max_batch_len << '\n'
       << "total batches:     " << r.total << '\n'
       << "reachable batches: " << r.reachable << '\n'
       << "redundant batches: " << r.redundancy.redundant << " (fraction "
       << detail::format_double(r.redundancy.fraction) << ")\n";
    if (r.composed_checked) {
        os << "composed table verified: " << r.generated.total << " entries match\n";
    }
    return os.str();
}

struct SmaxReport {
    std::uint32_t n = 1;
    double p_set = 0.5;
    double p_costly = 0.5;
    double expected_unbatched = 0.0;   // E[T_1]
    AnalyticValue expected_batched{};  // E[T_p]
    AnalyticValue s_max{};
    std::optional<MonteCarloResult> monte_carlo{};
};

// Evaluates the analytic cost model at (n, p_costly = 1 - p_set);
// optionally backs E[T_p] with a Monte-Carlo estimate. The probability
// must be strictly interior.
inline SmaxReport cmd_smax(std::uint32_t n, double p_set, bool with_monte_carlo = false,
                           std::uint64_t samples = 1'000'000, std::uint64_t seed = 0) {
    if (!(p_set > 0.0) || !(p_set < 1.0)) {
        throw DegenerateProbability(p_set);
    }
    const SpeedupModel m{n, 1.0 - p_set};
    SmaxReport rep;
    rep.n = n;
    rep.p_set = p_set;
    rep.p_costly = m.p_costly;
    rep.expected_unbatched = expected_unbatched_cost(m);
    rep.expected_batched = expected_batched_cost(m);
    rep.s_max = max_speedup(m);
    if (with_monte_carlo) {
        rep.monte_carlo = monte_carlo_batched_cost(m, samples, seed);
    }
    return rep;
}

inline std::string format_smax(const SmaxReport& r) {
    std::ostringstream os;
    os << "n=" << r.n << " p_set=" << detail::format_double(r.p_set)
       << " p_costly=" << detail::format_double(r.p_costly) << '\n'
       << "E[T_1]: " << detail::format_double(r.expected_unbatched) << '\n'
       << "E[T_p]: " << detail::format_double(r.expected_batched.value)
       << (r.expected_batched.degenerate_limit ? " (limit value)" : "") << '\n'
       << "s_max:  " << detail::format_double(r.s_max.value)
       << (r.s_max.degenerate_limit ? " (limit value)" : "") << '\n';
    if (r.monte_carlo) {
        os << "monte carlo E[T_p]: " << detail::format_double(r.monte_carlo->mean)
           << " (std error " << detail::format_double(r.monte_carlo->std_error) << ", "
           << r.monte_carlo->samples << " samples)\n";
    }
    return os.str();
}

}  // namespace batchsim::bench
