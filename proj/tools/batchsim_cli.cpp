#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "batchsim/batchsim.hpp"

// Command-line front end: `run` executes the Increment/Set benchmark and
// emits CSV, `counts` prints batch-count tables, `smax` evaluates the
// analytic speedup bound. Doubles as the usage example for wiring a
// model through validate_model / generate_batch_table / Engine::run.

namespace {

// Batch tables are compiled in up to this window length; longer requests
// fail with a diagnostic instead of exploding compile times.
constexpr std::size_t kMaxCompiledBatchLen = 6;
constexpr std::size_t kMaxCompiledTypes = 5;
constexpr std::size_t kMaxCompiledCountLen = 5;

int do_run(const batchsim::bench::BenchConfig& cfg) {
    const auto result = batchsim::bench::cmd_run<kMaxCompiledBatchLen>(cfg);
    if (cfg.out.empty()) {
        batchsim::bench::write_csv(std::cout, result.records);
    } else {
        std::ofstream file(cfg.out);
        if (!file) {
            throw batchsim::SimError("cannot open output file: " + cfg.out);
        }
        batchsim::bench::write_csv(file, result.records);
    }
    std::cout << batchsim::bench::format_summary(cfg, result.summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-event simulation with ahead-of-time composed event batches"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run the Increment/Set benchmark and emit CSV");
    batchsim::bench::BenchConfig cfg;
    cfg.max_batch_len = 2;
    cfg.p_set = 0.5;
    cfg.events = 10'000;
    cfg.iterations = 100'000;
    cfg.runs = 3;
    cfg.seed = 1;
    std::string mode = "both";
    run->add_option("--max-batch-len", cfg.max_batch_len, "maximum events per batch (n)")
        ->capture_default_str();
    run->add_option("--p-set", cfg.p_set, "probability that an event is Set")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    run->add_option("--events", cfg.events, "initial events per run")->capture_default_str();
    run->add_option("--iterations", cfg.iterations, "loop iterations per Increment event")
        ->capture_default_str();
    run->add_option("--runs", cfg.runs, "timed repetitions")->capture_default_str();
    run->add_option("--seed", cfg.seed, "base seed; run r uses seed + r")->capture_default_str();
    run->add_option("--mode", mode, "baseline|batched|both")
        ->check(CLI::IsMember({"baseline", "batched", "both"}))
        ->capture_default_str();
    run->add_option("--out", cfg.out, "CSV output path (CSV goes to stdout when omitted)");

    auto* counts = app.add_subcommand("counts", "print batch counts for an alphabet and window");
    std::size_t types = 2;
    std::uint32_t counts_len = 2;
    bool composed = false;
    counts->add_option("--types", types, "alphabet size")->capture_default_str();
    counts->add_option("--max-batch-len", counts_len, "maximum events per batch (n)")
        ->capture_default_str();
    counts->add_flag("--composed", composed,
                     "also generate the batch table and cross-check the counts");

    auto* smax = app.add_subcommand("smax", "evaluate the analytic speedup bound");
    std::uint32_t smax_len = 2;
    double smax_p = 0.5;
    bool monte_carlo = false;
    std::uint64_t samples = 1'000'000;
    std::uint64_t smax_seed = 0;
    smax->add_option("--max-batch-len", smax_len, "batch length (n)")->capture_default_str();
    smax->add_option("--p-set", smax_p, "probability that an event is Set, strictly in (0, 1)")
        ->capture_default_str();
    smax->add_flag("--monte-carlo", monte_carlo, "append a Monte-Carlo estimate of E[T_p]");
    smax->add_option("--samples", samples, "Monte-Carlo sample count")->capture_default_str();
    smax->add_option("--seed", smax_seed, "Monte-Carlo seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            cfg.mode = *batchsim::bench::parse_mode(mode);
            return do_run(cfg);
        }
        if (counts->parsed()) {
            std::cout << batchsim::bench::format_counts(
                batchsim::bench::cmd_counts<kMaxCompiledTypes, kMaxCompiledCountLen>(
                    types, counts_len, composed));
            return 0;
        }
        std::cout << batchsim::bench::format_smax(
            batchsim::bench::cmd_smax(smax_len, smax_p, monte_carlo, samples, smax_seed));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
