#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "growthlab/landscape.hpp"
#include "growthlab/model.hpp"
#include "growthlab/oracles.hpp"

namespace growthlab {

struct Verdict {
    enum class Kind { SingleSite, Pair, Undecided, Overflow };

    Kind kind = Kind::Undecided;
    int site = -1;        // localization site, or the pair's first site k
    bool certified = false;
    double residual_bound = std::numeric_limits<double>::infinity();
    long long R = 0;      // x_{k+2} - x_{k-1} at detection (Pair only)
    double ratio = 0.0;   // X_{k+1}/X_k at detection (Pair only)
    double predicted_ratio = 0.0; // e^{lambda_k R} (Pair only)
};

std::string to_string(Verdict::Kind kind);

/// Windowed localization detector fed allocation by allocation. Tracks the
/// length of the trailing run confined to one site and to one adjacent
/// pair of sites.
class LocalizationTracker {
public:
    LocalizationTracker(int n_sites, int window);

    void observe(int site);

    int window() const { return window_; }
    int single_site() const { return single_site_; }
    std::uint64_t single_run() const { return single_run_; }
    bool single_window_full() const {
        return single_run_ >= static_cast<std::uint64_t>(window_);
    }
    /// True when the trailing window is confined to an adjacent pair that
    /// saw both sites; k_out is the canonical first site of the pair.
    bool pair_window_full(int& k_out) const;
    std::uint64_t steps_seen() const { return steps_seen_; }

private:
    int n_sites_;
    int window_;
    int single_site_ = -1;
    std::uint64_t single_run_ = 0;
    int pair_a_ = -1; // first site seen in the current pair run
    int pair_b_ = -1; // second site, -1 until the run covers two sites
    std::uint64_t pair_run_ = 0;
    std::uint64_t steps_seen_ = 0;
};

/// Verdict from the tracker state and the final configuration. SingleSite
/// verdicts at a local maximum carry the escape bound and are certified
/// when it is below cert_threshold; Pair verdicts require exactly equal
/// lambdas on the pair and record R and the count ratio.
Verdict detect_localization(const Params& params, const LandscapeReport& landscape,
                            const Config& final_config, const LocalizationTracker& tracker,
                            double cert_threshold);

/// Replay convenience: feeds a recorded allocation stream to a fresh
/// tracker. Streams shorter than the window yield Undecided.
Verdict detect_localization(const Params& params, const Config& x0,
                            std::span<const int> alloc_sites, int window,
                            double cert_threshold);

struct FirstExitResult {
    enum class Kind { DPrime, DDoublePrime, Other, PairPersisted };

    Kind kind = Kind::PairPersisted;
    int exit_site = -1;
    std::uint64_t exit_time = 0; // 1-based step of the exit; steps run if persisted
    bool b_k = false;            // exit hit k+2 before anything outside the pair
};

std::string to_string(FirstExitResult::Kind kind);

/// Simulates from x0 until a particle lands outside the watched pair
/// {k, k+1}: k-1 is the D' exit, k+2 the D'' exit (also the B_k event for
/// a first exit), anything else Other. All allocations staying inside the
/// pair for max_steps is PairPersisted.
FirstExitResult first_exit(const Params& params, const Config& x0, int k,
                           RngStream& rng, std::uint64_t max_steps);

struct RatioDrift {
    long long R = 0;
    double ratio = 0.0;
    double predicted = 0.0;
    double rel_error = 0.0;
};

/// Theorem check for a Pair verdict: predicted ratio e^{lambda R} against
/// the final-count ratio. Throws when the verdict is not Pair.
RatioDrift ratio_drift(const Params& params, const Verdict& verdict);

struct BatchOptions {
    std::uint64_t runs = 1;
    std::uint64_t steps = 100'000;
    std::uint64_t master_seed = 0;
    int window = 2'000;
    double cert_threshold = 1e-6;
    int threads = 0; // 0: auto (hardware, capped by GROWTHLAB_THREADS)
    bool stop_on_certified = true;
};

struct RunRow {
    std::uint64_t run_id = 0;
    std::uint64_t stream_key = 0;
    std::uint64_t steps_executed = 0;
    Verdict verdict;
};

struct BatchReport {
    std::uint64_t runs = 0;
    std::uint64_t master_seed = 0;
    std::map<std::string, std::uint64_t> verdict_histogram;
    std::map<int, std::uint64_t> site_histogram; // localization site (0-based)
    std::map<long long, std::uint64_t> r_histogram;
    double mean_abs_ratio_error = 0.0; // mean |ratio - predicted| over Pair rows
    std::vector<RunRow> rows;
};

/// Runs `runs` independent trajectories on streams (master_seed, run_id),
/// detects localization in each and aggregates. The report is a pure
/// function of (params, x0, options): trajectories parallelize over
/// stripes of run indices and land in per-run slots, so any thread count
/// produces the identical report.
BatchReport run_batch(const Params& params, const Config& x0, const BatchOptions& options);

/// Fixed-header CSV of the per-run rows; floats carry 17 significant
/// digits so parsing the file round-trips exactly.
std::string batch_csv(const BatchReport& report);

/// Direct chain estimate of P_x(first n+1 allocations land in {k, k+1}),
/// the same event the Bernoulli representation of pair_stick_probability_mc
/// integrates. Streams are (seed, sample_index).
McEstimate chain_pair_stick_mc(const Params& params, const Config& x0, int k,
                               std::uint64_t n, std::uint64_t samples, std::uint64_t seed);

/// Direct chain estimate of P_x(all subsequent particles land at k) for a
/// dominant local maximum. A run counts as sticking once the escape bound
/// certifies the remaining deviation probability below residual_tol, so
/// the estimator's bias is below residual_tol per run.
McEstimate chain_single_site_stick_mc(const Params& params, const Config& x0, int k,
                                      std::uint64_t samples, std::uint64_t seed,
                                      double residual_tol = 1e-12);

} // namespace growthlab
