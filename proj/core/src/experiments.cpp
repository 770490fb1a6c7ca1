#include "growthlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>

#include "growthlab/parallel.hpp"

namespace growthlab {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

bool adjacent(int a, int b, int n) {
    return wrap(a + 1, n) == b || wrap(b + 1, n) == a;
}

/// Escape bound at `site`, or nullopt when the certificate's
/// preconditions (local maximum holding the maximal rate) fail.
std::optional<double> certified_escape_bound(const Params& params,
                                             const LandscapeReport& landscape,
                                             const Config& config, int site) {
    if (!landscape.is_local_maximum(site)) return std::nullopt;
    const std::vector<double> l = log_rates(params, config);
    for (double v : l) {
        if (v > l[site]) return std::nullopt;
    }
    return escape_bound(params, config, site);
}

} // namespace

std::string to_string(Verdict::Kind kind) {
    switch (kind) {
        case Verdict::Kind::SingleSite: return "single_site";
        case Verdict::Kind::Pair: return "pair";
        case Verdict::Kind::Undecided: return "undecided";
        case Verdict::Kind::Overflow: return "overflow";
    }
    return "unknown";
}

std::string to_string(FirstExitResult::Kind kind) {
    switch (kind) {
        case FirstExitResult::Kind::DPrime: return "D_prime";
        case FirstExitResult::Kind::DDoublePrime: return "D_double_prime";
        case FirstExitResult::Kind::Other: return "other";
        case FirstExitResult::Kind::PairPersisted: return "pair_persisted";
    }
    return "unknown";
}

LocalizationTracker::LocalizationTracker(int n_sites, int window)
    : n_sites_(n_sites), window_(window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
}

void LocalizationTracker::observe(int site) {
    ++steps_seen_;
    if (site == single_site_) {
        ++single_run_;
    } else {
        single_site_ = site;
        single_run_ = 1;
    }
    if (site == pair_a_ || site == pair_b_) {
        ++pair_run_;
    } else if (pair_a_ >= 0 && pair_b_ < 0 && adjacent(site, pair_a_, n_sites_)) {
        pair_b_ = site;
        ++pair_run_;
    } else {
        pair_a_ = site;
        pair_b_ = -1;
        pair_run_ = 1;
    }
}

bool LocalizationTracker::pair_window_full(int& k_out) const {
    if (pair_b_ < 0 || pair_run_ < static_cast<std::uint64_t>(window_)) return false;
    // Canonical orientation: k such that k+1 (mod N) is the other site.
    if (wrap(pair_a_ + 1, n_sites_) == pair_b_) {
        k_out = pair_a_;
    } else {
        k_out = pair_b_;
    }
    return true;
}

Verdict detect_localization(const Params& params, const LandscapeReport& landscape,
                            const Config& final_config, const LocalizationTracker& tracker,
                            double cert_threshold) {
    Verdict v;
    if (tracker.single_window_full()) {
        v.kind = Verdict::Kind::SingleSite;
        v.site = tracker.single_site();
        if (const auto bound =
                certified_escape_bound(params, landscape, final_config, v.site)) {
            v.residual_bound = *bound;
            v.certified = *bound < cert_threshold;
        }
        return v;
    }
    int k = -1;
    if (tracker.pair_window_full(k)) {
        const int n = params.n_sites();
        const int kp1 = wrap(k + 1, n);
        if (params.lambdas[k] == params.lambdas[kp1]) {
            v.kind = Verdict::Kind::Pair;
            v.site = k;
            v.R = r_of(final_config, k);
            v.ratio = static_cast<double>(final_config.counts[kp1]) /
                      static_cast<double>(final_config.counts[k]);
            v.predicted_ratio = std::exp(params.lambdas[k] * static_cast<double>(v.R));
            return v;
        }
    }
    return v; // Undecided
}

Verdict detect_localization(const Params& params, const Config& x0,
                            std::span<const int> alloc_sites, int window,
                            double cert_threshold) {
    const LandscapeReport landscape = classify(params);
    LocalizationTracker tracker(params.n_sites(), window);
    Config config = x0;
    for (int site : alloc_sites) {
        if (site < 0 || site >= params.n_sites()) {
            throw std::out_of_range("allocation site out of range");
        }
        ++config.counts[site];
        tracker.observe(site);
    }
    return detect_localization(params, landscape, config, tracker, cert_threshold);
}

FirstExitResult first_exit(const Params& params, const Config& x0, int k,
                           RngStream& rng, std::uint64_t max_steps) {
    const int n = params.n_sites();
    const int kp1 = wrap(k + 1, n);
    const int km1 = wrap(k - 1, n);
    const int kp2 = wrap(k + 2, n);
    Config config = x0;
    std::vector<double> scratch;
    for (std::uint64_t s = 1; s <= max_steps; ++s) {
        const int site = detail::sample_site(params, config, rng, scratch);
        if (config.counts[site] + 1 >= kCountCap) {
            throw std::runtime_error("first_exit: count saturation");
        }
        ++config.counts[site];
        if (site == k || site == kp1) continue;
        FirstExitResult out;
        out.exit_site = site;
        out.exit_time = s;
        if (site == km1) {
            out.kind = FirstExitResult::Kind::DPrime;
        } else if (site == kp2) {
            out.kind = FirstExitResult::Kind::DDoublePrime;
            out.b_k = true;
        } else {
            out.kind = FirstExitResult::Kind::Other;
        }
        return out;
    }
    FirstExitResult out;
    out.kind = FirstExitResult::Kind::PairPersisted;
    out.exit_time = max_steps;
    return out;
}

RatioDrift ratio_drift(const Params& params, const Verdict& verdict) {
    if (verdict.kind != Verdict::Kind::Pair) {
        throw std::invalid_argument("ratio_drift requires a Pair verdict");
    }
    RatioDrift out;
    out.R = verdict.R;
    out.ratio = verdict.ratio;
    out.predicted = std::exp(params.lambdas[verdict.site] * static_cast<double>(verdict.R));
    out.rel_error = std::abs(out.ratio / out.predicted - 1.0);
    return out;
}

namespace {

RunRow run_one(const Params& params, const LandscapeReport& landscape, const Config& x0,
               const BatchOptions& options, std::uint64_t run_id) {
    RngStream rng(options.master_seed, run_id);
    LocalizationTracker tracker(params.n_sites(), options.window);
    bool certified_stop = false;
    double certified_bound = std::numeric_limits<double>::infinity();

    const StepObserver observer = [&](std::uint64_t, int site, const Config& config) {
        tracker.observe(site);
        if (options.stop_on_certified && tracker.single_window_full() &&
            (tracker.single_run() - static_cast<std::uint64_t>(options.window)) % 64 == 0) {
            if (const auto bound = certified_escape_bound(params, landscape, config,
                                                          tracker.single_site())) {
                if (*bound < options.cert_threshold) {
                    certified_stop = true;
                    certified_bound = *bound;
                    return false;
                }
            }
        }
        return true;
    };

    const TrajectorySummary summary = simulate(params, x0, options.steps, rng, observer);

    RunRow row;
    row.run_id = run_id;
    row.stream_key = rng.stream_key();
    row.steps_executed = summary.steps_executed;
    if (summary.overflow) {
        row.verdict.kind = Verdict::Kind::Overflow;
        row.verdict.site = summary.overflow_site;
    } else if (certified_stop) {
        row.verdict.kind = Verdict::Kind::SingleSite;
        row.verdict.site = tracker.single_site();
        row.verdict.certified = true;
        row.verdict.residual_bound = certified_bound;
    } else {
        row.verdict = detect_localization(params, landscape, summary.final_config, tracker,
                                          options.cert_threshold);
    }
    return row;
}

} // namespace

BatchReport run_batch(const Params& params, const Config& x0, const BatchOptions& options) {
    if (options.runs < 1) throw std::invalid_argument("runs must be >= 1");
    const LandscapeReport landscape = classify(params);
    BatchReport report;
    report.runs = options.runs;
    report.master_seed = options.master_seed;
    report.rows.resize(options.runs);

    const int threads = effective_threads(options.threads);
    parallel_for_index(options.runs, threads, [&](std::uint64_t i) {
        report.rows[i] = run_one(params, landscape, x0, options, i);
    });

    double abs_err_sum = 0.0;
    std::uint64_t abs_err_count = 0;
    for (const RunRow& row : report.rows) {
        ++report.verdict_histogram[to_string(row.verdict.kind)];
        if (row.verdict.kind == Verdict::Kind::SingleSite ||
            row.verdict.kind == Verdict::Kind::Pair) {
            ++report.site_histogram[row.verdict.site];
        }
        if (row.verdict.kind == Verdict::Kind::Pair) {
            ++report.r_histogram[row.verdict.R];
            const double err = std::abs(row.verdict.ratio - row.verdict.predicted_ratio);
            if (std::isfinite(err)) {
                abs_err_sum += err;
                ++abs_err_count;
            }
        }
    }
    if (abs_err_count > 0) {
        report.mean_abs_ratio_error = abs_err_sum / static_cast<double>(abs_err_count);
    }
    return report;
}

namespace {

void append_g17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

std::string batch_csv(const BatchReport& report) {
    std::string out =
        "run_id,seed,verdict,site,certified,residual_bound,R,ratio,predicted_ratio,"
        "steps_executed\n";
    for (const RunRow& row : report.rows) {
        out += std::to_string(row.run_id);
        out += ',';
        out += std::to_string(row.stream_key);
        out += ',';
        out += to_string(row.verdict.kind);
        out += ',';
        if (row.verdict.site >= 0) out += std::to_string(row.verdict.site + 1);
        out += ',';
        out += row.verdict.certified ? "true" : "false";
        out += ',';
        if (row.verdict.kind == Verdict::Kind::SingleSite &&
            std::isfinite(row.verdict.residual_bound)) {
            append_g17(out, row.verdict.residual_bound);
        }
        out += ',';
        if (row.verdict.kind == Verdict::Kind::Pair) {
            out += std::to_string(row.verdict.R);
            out += ',';
            append_g17(out, row.verdict.ratio);
            out += ',';
            append_g17(out, row.verdict.predicted_ratio);
        } else {
            out += ",,";
        }
        out += ',';
        out += std::to_string(row.steps_executed);
        out += '\n';
    }
    return out;
}

McEstimate chain_pair_stick_mc(const Params& params, const Config& x0, int k,
                               std::uint64_t n, std::uint64_t samples, std::uint64_t seed) {
    const int sites = params.n_sites();
    const int kp1 = wrap(k + 1, sites);
    std::uint64_t hits = 0;
    std::vector<double> scratch;
    for (std::uint64_t s = 0; s < samples; ++s) {
        RngStream rng(seed, s);
        Config config = x0;
        bool stayed = true;
        for (std::uint64_t i = 0; i <= n; ++i) {
            const int site = detail::sample_site(params, config, rng, scratch);
            if (site != k && site != kp1) {
                stayed = false;
                break;
            }
            ++config.counts[site];
        }
        if (stayed) ++hits;
    }
    McEstimate est;
    est.samples = samples;
    est.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    est.std_error =
        std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(samples));
    return est;
}

McEstimate chain_single_site_stick_mc(const Params& params, const Config& x0, int k,
                                      std::uint64_t samples, std::uint64_t seed,
                                      double residual_tol) {
    std::uint64_t hits = 0;
    std::vector<double> scratch;
    constexpr std::uint64_t kMaxAllocations = 1'000'000;
    for (std::uint64_t s = 0; s < samples; ++s) {
        RngStream rng(seed, s);
        Config config = x0;
        bool stuck = false;
        for (std::uint64_t i = 0; i < kMaxAllocations; ++i) {
            const int site = detail::sample_site(params, config, rng, scratch);
            if (site != k) break;
            ++config.counts[site];
            if (escape_bound(params, config, k) < residual_tol) {
                stuck = true;
                break;
            }
        }
        if (stuck) ++hits;
    }
    McEstimate est;
    est.samples = samples;
    est.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    est.std_error =
        std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(samples));
    return est;
}

} // namespace growthlab
