#include "growthlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "growthlab/experiments.hpp"
#include "growthlab/landscape.hpp"
#include "growthlab/model.hpp"
#include "growthlab/oracles.hpp"
#include "growthlab/parallel.hpp"
#include "growthlab/progressions.hpp"

namespace growthlab {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Check {
    bool ok = true;
    bool first = true;
    std::ostringstream details;

    void require(bool condition, const std::string& what) {
        if (!first) details << "; ";
        first = false;
        details << (condition ? "" : "FAILED: ") << what;
        ok = ok && condition;
    }
};

// ---- Criterion 1: localization at the local maxima of a mixed landscape.

CriterionResult criterion_theorem1_single_site(const AcceptanceOptions& options) {
    CriterionResult res{1, "theorem1_i_single_site_localization"};
    const Params params = make_params({1.0, 2.0, 1.5, 2.5, 0.5});
    BatchOptions batch;
    batch.runs = 2'000;
    batch.steps = 20'000;
    batch.master_seed = options.master_seed + 1;
    batch.window = 2'000;
    batch.cert_threshold = 1e-6;
    batch.threads = options.threads;
    const auto start = std::chrono::steady_clock::now();
    const BatchReport report = run_batch(params, zero_config(5), batch);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::uint64_t at_site2 = 0, at_site4 = 0;
    for (const RunRow& row : report.rows) {
        if (row.verdict.kind != Verdict::Kind::SingleSite) continue;
        if (row.verdict.site == 1) ++at_site2; // 1-based site 2
        if (row.verdict.site == 3) ++at_site4; // 1-based site 4
    }
    const double frac =
        static_cast<double>(at_site2 + at_site4) / static_cast<double>(batch.runs);
    Check c;
    c.require(frac >= 0.99, "single-site fraction at sites {2,4} = " + fmt(frac) + " >= 0.99");
    c.require(at_site2 > 0, "site 2 frequency " + std::to_string(at_site2) + " > 0");
    c.require(at_site4 > 0, "site 4 frequency " + std::to_string(at_site4) + " > 0");
    c.require(elapsed < 120.0, "batch runtime " + fmt(elapsed) + " s < 120 s");
    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

// ---- Criterion 2: pair localization and the ratio limit e^{lambda R}.

CriterionResult criterion_theorem1_pair_ratio(const AcceptanceOptions& options) {
    CriterionResult res{2, "theorem1_ii_pair_ratio_limit"};
    const Params params = make_params({1.0, 1.0, 1.0, 1.0});
    BatchOptions batch;
    batch.runs = 500;
    batch.steps = 100'000;
    batch.master_seed = options.master_seed + 2;
    batch.window = 2'000;
    batch.threads = options.threads;
    batch.stop_on_certified = false;
    const BatchReport report = run_batch(params, zero_config(4), batch);

    std::uint64_t pairs = 0;
    std::vector<double> rel_errors;
    for (const RunRow& row : report.rows) {
        if (row.verdict.kind != Verdict::Kind::Pair) continue;
        ++pairs;
        if (std::llabs(row.verdict.R) <= 3) {
            rel_errors.push_back(ratio_drift(params, row.verdict).rel_error);
        }
    }
    const double pair_frac = static_cast<double>(pairs) / static_cast<double>(batch.runs);
    Check c;
    c.require(pair_frac >= 0.95, "pair-verdict fraction = " + fmt(pair_frac) + " >= 0.95");
    c.require(!rel_errors.empty(), "runs with |R| <= 3 exist");
    if (!rel_errors.empty()) {
        std::sort(rel_errors.begin(), rel_errors.end());
        const double median = rel_errors[rel_errors.size() / 2];
        c.require(median < 0.05,
                  "median |ratio/e^R - 1| = " + fmt(median) + " < 0.05 over " +
                      std::to_string(rel_errors.size()) + " runs");
    }
    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

// ---- Criterion 3: exact product oracle vs direct chain Monte Carlo.

CriterionResult criterion_exact_oracle_agreement(const AcceptanceOptions& options) {
    CriterionResult res{3, "single_site_oracle_vs_chain_mc"};
    const Params params = make_params({1.0, 3.0, 1.0, 1.0});
    const Config x0 = zero_config(4);
    const int k = 1; // 1-based site 2
    const double oracle = single_site_stick_probability(params, x0, k, 1e-10);
    const McEstimate mc =
        chain_single_site_stick_mc(params, x0, k, 100'000, options.master_seed + 3);
    Check c;
    c.require(std::abs(oracle - 0.18113954885287209) <= 1e-8,
              "oracle value " + fmt(oracle) + " matches the recomputed product 0.18113955");
    c.require(std::abs(oracle - mc.estimate) <= 3.0 * mc.std_error,
              "|oracle - chain MC| = " + fmt(std::abs(oracle - mc.estimate)) +
                  " <= 3 SE = " + fmt(3.0 * mc.std_error));
    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

// ---- Criterion 4: Bernoulli representation vs chain MC on a saddle.

CriterionResult criterion_representation_agreement(const AcceptanceOptions& options) {
    CriterionResult res{4, "pair_stick_representation_vs_chain_mc"};
    const Params params = make_params({0.5, 1.0, 1.0, 2.0, 0.7});
    const Config x0 = make_config({1, 0, 0, 0, 0}, params); // r = -1 < z2 = 0
    const int k = 1;
    Check c;
    for (std::uint64_t n : {5ull, 20ull, 50ull}) {
        const McEstimate bern = pair_stick_probability_mc(params, x0, k, n, 10'000,
                                                          options.master_seed + 40 + n);
        const McEstimate chain =
            chain_pair_stick_mc(params, x0, k, n, 10'000, options.master_seed + 90 + n);
        const double diff = std::abs(bern.estimate - chain.estimate);
        const double slack = 3.0 * std::sqrt(bern.std_error * bern.std_error +
                                             chain.std_error * chain.std_error);
        c.require(diff <= slack, "n=" + std::to_string(n) + ": |" + fmt(bern.estimate) +
                                     " - " + fmt(chain.estimate) + "| <= " + fmt(slack));
    }
    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

// ---- Criterion 5: Proposition P0, (z1 < z2) iff Type1.

CriterionResult criterion_p0_equivalence(const AcceptanceOptions& options) {
    CriterionResult res{5, "p0_z_interval_iff_type1"};
    RngStream rng(options.master_seed + 5, 0);
    std::uint64_t agree = 0;
    const std::uint64_t trials = 10'000;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const double lambda = 0.05 + 2.95 * rng.next_double();
        const double left = lambda + 0.01 + 2.99 * rng.next_double();
        const double right = lambda + 0.01 + 2.99 * rng.next_double();
        const auto [z1, z2] = z_values(left, lambda, right);
        const bool interval_nonempty = *z1 < *z2;
        const bool type1 = pair_type(left, lambda, right) == PairType::Type1;
        if (interval_nonempty == type1) ++agree;
    }
    Check c;
    c.require(agree == trials,
              std::to_string(agree) + "/" + std::to_string(trials) + " agreements");
    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

// ---- Criterion 6: F_n(zeta) equals Z_n(eta) in distribution, exactly.

CriterionResult criterion_fn_zn_enumeration(const AcceptanceOptions& options) {
    CriterionResult res{6, "fn_equals_zn_reciprocal_enumeration"};
    RngStream rng(options.master_seed + 6, 0);
    Check c;
    int failures = 0;
    for (int spec_idx = 0; spec_idx < 20; ++spec_idx) {
        const double lambda_side = 0.2 + 2.8 * rng.next_double();
        const double lambda = 0.2 + 2.8 * rng.next_double();
        const double p = 0.05 + 0.9 * rng.next_double();
        const ZetaSpec spec = (spec_idx % 2 == 0)
                                  ? ZetaSpec::zeta2(lambda_side, lambda, p)
                                  : ZetaSpec::zeta1(lambda_side, lambda, p);
        for (int n = 1; n <= 10; ++n) {
            const EnumeratedDistributions dists = enumerate_Fn_vs_Zn(spec, n);
            if (!weighted_distributions_match(dists.f_n, dists.z_n_reciprocal, 1e-12)) {
                ++failures;
            }
        }
    }
    c.require(failures == 0, "all 20 specs x n<=10 enumerations match (" +
                                 std::to_string(failures) + " mismatches)");
    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

// ---- Criterion 7: stochastic-domination suite (P2.2, P3, CRN coupling).

CriterionResult criterion_domination_suite(const AcceptanceOptions& options) {
    CriterionResult res{7, "stochastic_domination_suite"};
    Check c;

    // P2 part 2: p' <= p'' makes zeta2 st-smaller, so E[e^-Z] is larger.
    const DominanceReport dom =
        dominance_check(ZetaSpec::zeta2(2.0, 1.0, 0.1), ZetaSpec::zeta2(2.0, 1.0, 0.3),
                        10'000, options.master_seed + 7);
    c.require(dom.predicted == +1 && dom.holds_within_3se,
              "E[e^-Z](p'=0.1) = " + fmt(dom.est_a) + " >= E[e^-Z](p''=0.3) = " +
                  fmt(dom.est_b) + " within 3 SE");

    // P3: gamma Z_{m-1} <= F_{m-1} on every path.
    const ZetaSpec pos = ZetaSpec::zeta2(2.0, 1.0, 0.9); // drift 0.8
    const double gamma = 0.5;
    std::uint64_t p3_violations = 0;
    for (std::uint64_t s = 0; s < 10'000; ++s) {
        RngStream rng(options.master_seed + 70, s);
        const StoppedSample stop = sample_Z_until_stopping(pos, gamma, rng);
        if (!(gamma * stop.z_before <= stop.f_before)) ++p3_violations;
    }
    c.require(p3_violations == 0, "gamma*Z_{m-1} <= F_{m-1} on all 10000 paths");

    // Pathwise ordering of Z_n under common random numbers for p' <= p''.
    const ZetaSpec lo = ZetaSpec::zeta2(2.0, 1.0, 0.2);
    const ZetaSpec hi = ZetaSpec::zeta2(2.0, 1.0, 0.6);
    std::uint64_t crn_violations = 0;
    for (std::uint64_t s = 0; s < 2'000; ++s) {
        RngStream rng(options.master_seed + 71, s);
        double y_lo = 1.0, z_lo = 1.0, y_hi = 1.0, z_hi = 1.0;
        for (int i = 0; i < 40; ++i) {
            const double u = rng.next_double();
            y_lo *= lo.term(u < lo.p);
            z_lo += y_lo;
            y_hi *= hi.term(u < hi.p);
            z_hi += y_hi;
            if (z_lo > z_hi) ++crn_violations;
        }
    }
    c.require(crn_violations == 0, "Z_n(p') <= Z_n(p'') pathwise under shared uniforms");

    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

// ---- Criterion 8: zero-sticking decay of the upper bound, chain-consistent.

CriterionResult criterion_zero_sticking_decay(const AcceptanceOptions& options) {
    CriterionResult res{8, "zero_sticking_upper_bound_decay"};
    const Params params = make_params({0.5, 1.0, 1.0, 2.0, 0.7});
    const Config x0 = make_config({0, 2, 0, 1, 0}, params); // r = 1 > z2 = 0
    const int k = 1;
    const PairRates pr = pair_rates(params, x0, k);
    const double drift = pr.lambda_next2 * pr.p - pr.lambda;
    Check c;
    c.require(drift >= 0.3, "drift lambda_{k+2} p - lambda = " + fmt(drift) + " >= 0.3");
    const McEstimate upper =
        pair_stick_upper_bound_mc(params, x0, k, 2'000, 10'000, options.master_seed + 8);
    c.require(upper.estimate < 0.05,
              "upper bound at n=2000 = " + fmt(upper.estimate) + " < 0.05");
    const McEstimate chain =
        chain_pair_stick_mc(params, x0, k, 2'000, 10'000, options.master_seed + 80);
    const double slack = 3.0 * std::sqrt(upper.std_error * upper.std_error +
                                         chain.std_error * chain.std_error);
    c.require(chain.estimate <= upper.estimate + slack,
              "chain MC " + fmt(chain.estimate) + " <= upper bound + 3 SE = " +
                  fmt(upper.estimate + slack));
    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

// ---- Criterion 9: certificate soundness.

struct CertifyExtendOutcome {
    bool certified = false;
    bool deviated = false;
};

CertifyExtendOutcome certify_then_extend(const Params& params,
                                         const LandscapeReport& landscape, const Config& x0,
                                         std::uint64_t steps_cap, int window,
                                         double threshold, RngStream& rng) {
    LocalizationTracker tracker(params.n_sites(), window);
    bool certified = false;
    const StepObserver observer = [&](std::uint64_t, int site, const Config& config) {
        tracker.observe(site);
        if (tracker.single_window_full() &&
            (tracker.single_run() - static_cast<std::uint64_t>(window)) % 64 == 0) {
            const std::vector<double> l = log_rates(params, config);
            const int s = tracker.single_site();
            if (landscape.is_local_maximum(s) &&
                *std::max_element(l.begin(), l.end()) <= l[s] &&
                escape_bound(params, config, s) < threshold) {
                certified = true;
                return false;
            }
        }
        return true;
    };
    const TrajectorySummary phase1 = simulate(params, x0, steps_cap, rng, observer);
    CertifyExtendOutcome out;
    if (!certified) return out;
    out.certified = true;
    const int site = tracker.single_site();
    const std::uint64_t extension = 10 * phase1.steps_executed;
    const StepObserver watcher = [&](std::uint64_t, int s, const Config&) {
        if (s != site) {
            out.deviated = true;
            return false;
        }
        return true;
    };
    simulate(params, phase1.final_config, extension, rng, watcher);
    return out;
}

CriterionResult criterion_certificate_soundness(const AcceptanceOptions& options) {
    CriterionResult res{9, "certificate_soundness"};
    const Params params = make_params({1.0, 2.0, 1.5, 2.5, 0.5});
    const LandscapeReport landscape = classify(params);
    const std::uint64_t attempts = 1'200;
    std::vector<CertifyExtendOutcome> outcomes(attempts);
    parallel_for_index(attempts, effective_threads(options.threads), [&](std::uint64_t i) {
        RngStream rng(options.master_seed + 9, i);
        outcomes[i] = certify_then_extend(params, landscape, zero_config(5), 20'000, 2'000,
                                          1e-6, rng);
    });
    std::uint64_t certified = 0, deviated = 0;
    for (const auto& o : outcomes) {
        if (o.certified) ++certified;
        if (o.deviated) ++deviated;
    }
    Check c;
    c.require(certified >= 1'000,
              std::to_string(certified) + " certified runs (need >= 1000)");
    const double frac = certified > 0 ? static_cast<double>(deviated) /
                                            static_cast<double>(certified)
                                      : 1.0;
    c.require(frac <= 1e-4, "post-certification deviation fraction = " + fmt(frac) +
                                " <= 1e-4 (" + std::to_string(deviated) + " deviations)");

    // Union bound dominates the exact complement on random valid instances.
    RngStream rng(options.master_seed + 90, 0);
    std::uint64_t bound_violations = 0;
    const std::uint64_t instances = 1'000;
    for (std::uint64_t t = 0; t < instances; ++t) {
        const int n = 4 + static_cast<int>(rng.next_u64() % 5);
        std::vector<double> lambdas(n);
        for (double& v : lambdas) v = 0.2 + 2.8 * rng.next_double();
        const int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        const int km1 = (k + n - 1) % n, kp1 = (k + 1) % n;
        lambdas[k] = std::max(lambdas[km1], lambdas[kp1]) + 0.1 + 2.0 * rng.next_double();
        const Params inst = make_params(lambdas);
        Config config = zero_config(n);
        for (int i = 0; i < n; ++i) config.counts[i] = rng.next_u64() % 12;
        // Top up k until its rate dominates; lambda_k is the strict maximum
        // of the neighbourhood so this terminates.
        for (int guard = 0; guard < 4'000; ++guard) {
            const std::vector<double> l = log_rates(inst, config);
            if (*std::max_element(l.begin(), l.end()) <= l[k]) break;
            ++config.counts[k];
        }
        const double bound = escape_bound(inst, config, k);
        // 1 - stick through the complementary oracle: subtracting the stick
        // probability from 1 quantizes to 1.1e-16 steps near certainty and
        // would falsely break the exact inequality.
        const double escape = single_site_escape_probability(inst, config, k, 1e-10);
        if (!(bound >= escape)) ++bound_violations;
    }
    c.require(bound_violations == 0,
              "escape_bound >= 1 - stick on all " + std::to_string(instances) +
                  " random instances");
    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

// ---- Criterion 10: byte-identical CSV across thread counts.

CriterionResult criterion_determinism(const AcceptanceOptions& options) {
    CriterionResult res{10, "csv_determinism_across_thread_counts"};
    const Params params = make_params({1.0, 2.0, 1.5, 2.5, 0.5});
    std::string first;
    Check c;
    for (int threads : {1, 4, 16}) {
        BatchOptions batch;
        batch.runs = 200;
        batch.steps = 2'000;
        batch.master_seed = options.master_seed + 10;
        batch.window = 500;
        batch.threads = threads;
        const BatchReport report = run_batch(params, zero_config(5), batch);
        const std::string csv = batch_csv(report);
        if (first.empty()) {
            first = csv;
        } else {
            c.require(csv == first, "CSV with " + std::to_string(threads) +
                                        " threads matches the single-thread bytes");
        }
    }
    res.passed = c.ok;
    res.details = c.details.str();
    return res;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
    using Runner = CriterionResult (*)(const AcceptanceOptions&);
    const Runner runners[] = {
        criterion_theorem1_single_site, criterion_theorem1_pair_ratio,
        criterion_exact_oracle_agreement, criterion_representation_agreement,
        criterion_p0_equivalence,        criterion_fn_zn_enumeration,
        criterion_domination_suite,      criterion_zero_sticking_decay,
        criterion_certificate_soundness, criterion_determinism,
    };
    std::vector<CriterionResult> results;
    results.reserve(std::size(runners));
    for (Runner runner : runners) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r = runner(options);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
        results.push_back(std::move(r));
    }
    return results;
}

int run_acceptance_and_print(std::ostream& out, const AcceptanceOptions& options) {
    const std::vector<CriterionResult> results = run_acceptance(options);
    int failures = 0;
    for (const CriterionResult& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": " << r.name
            << " (" << fmt(r.seconds) << " s) - " << r.details << "\n";
        if (!r.passed) ++failures;
    }
    out << (failures == 0 ? "acceptance: all criteria passed"
                          : "acceptance: " + std::to_string(failures) + " criteria FAILED")
        << "\n";
    return failures;
}

} // namespace growthlab
