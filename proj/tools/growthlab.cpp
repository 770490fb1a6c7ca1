#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "growthlab/acceptance.hpp"
#include "growthlab/experiments.hpp"
#include "growthlab/io.hpp"
#include "growthlab/landscape.hpp"
#include "growthlab/model.hpp"
#include "growthlab/oracles.hpp"
#include "growthlab/progressions.hpp"

namespace {

using nlohmann::json;
namespace gl = growthlab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitAcceptance = 4;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> runs;
    std::optional<std::uint64_t> steps;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gl::ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << content;
}

gl::RunConfig load_config(const CliOptions& cli) {
    gl::RunConfig config = gl::parse_config(read_file(cli.config_path));
    if (cli.seed) config.seed = *cli.seed;
    if (cli.runs) config.runs = *cli.runs;
    if (cli.steps) config.steps = *cli.steps;
    return config;
}

std::filesystem::path ensure_out_dir(const CliOptions& cli) {
    std::filesystem::path dir = cli.out_dir.empty() ? "." : cli.out_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

int cmd_simulate(const CliOptions& cli) {
    const gl::RunConfig config = load_config(cli);
    const gl::Params params = config.params();
    gl::BatchOptions batch;
    batch.runs = config.runs;
    batch.steps = config.steps;
    batch.master_seed = config.seed;
    batch.window = config.window;
    batch.cert_threshold = config.cert_threshold;
    const gl::BatchReport report = gl::run_batch(params, config.initial_config(), batch);
    const std::filesystem::path dir = ensure_out_dir(cli);
    const std::string report_json = gl::batch_report_json(report);
    write_file(dir / "report.json", report_json + "\n");
    write_file(dir / "runs.csv", gl::batch_csv(report));
    std::cout << report_json << "\n";
    return kExitOk;
}

int cmd_classify(const CliOptions& cli) {
    const gl::RunConfig config = load_config(cli);
    const gl::Params params = config.params();
    const std::string doc = gl::landscape_json(params, gl::classify(params));
    if (!cli.out_dir.empty()) {
        write_file(ensure_out_dir(cli) / "landscape.json", doc + "\n");
    }
    std::cout << doc << "\n";
    return kExitOk;
}

json mc_json(const gl::McEstimate& est) {
    return json{{"estimate", est.estimate},
                {"std_error", est.std_error},
                {"samples", est.samples}};
}

int cmd_oracle(const CliOptions& cli) {
    const gl::RunConfig config = load_config(cli);
    if (!config.oracle) {
        throw gl::ConfigError("oracle command requires an \"oracle\" config object");
    }
    const gl::Params params = config.params();
    const gl::Config x0 = config.initial_config();
    const gl::OracleRequest& req = *config.oracle;
    const int k = req.k - 1; // config uses 1-based sites

    json doc;
    doc["op"] = req.op;
    doc["k"] = req.k;
    if (req.op == "single_site_stick") {
        doc["tol"] = req.tol;
        doc["value"] = gl::single_site_stick_probability(params, x0, k, req.tol);
    } else if (req.op == "escape_bound") {
        doc["bound"] = gl::escape_bound(params, x0, k);
    } else if (req.op == "pair_stick_mc" || req.op == "pair_stick_upper_mc") {
        const bool upper = req.op == "pair_stick_upper_mc";
        const gl::McEstimate est =
            upper ? gl::pair_stick_upper_bound_mc(params, x0, k, req.n, req.samples,
                                                  config.seed)
                  : gl::pair_stick_probability_mc(params, x0, k, req.n, req.samples,
                                                  config.seed);
        doc["n"] = req.n;
        doc["seed"] = config.seed;
        doc.update(mc_json(est));
    } else if (req.op == "relocation_time") {
        std::uint64_t sum = 0, max_v = 0;
        std::uint64_t side1 = 0, side2 = 0;
        for (std::uint64_t s = 0; s < req.samples; ++s) {
            gl::RngStream rng(config.seed, s);
            const gl::RelocationResult r =
                gl::relocation_stopping_time(params, x0, k, rng);
            sum += r.n_hat;
            max_v = std::max(max_v, r.n_hat);
            (r.side == 1 ? side1 : side2) += 1;
        }
        doc["samples"] = req.samples;
        doc["seed"] = config.seed;
        doc["mean_n_hat"] = static_cast<double>(sum) / static_cast<double>(req.samples);
        doc["max_n_hat"] = max_v;
        doc["side_k_minus_1"] = side1;
        doc["side_k_plus_2"] = side2;
    } else if (req.op == "regime") {
        const gl::RegimeVerdict v = gl::regime(params, x0, k);
        doc["kind"] = gl::to_string(v.kind);
        doc["clause"] = v.clause;
        doc["r"] = v.r;
        doc["p"] = v.p;
        if (std::isfinite(v.z1)) doc["z1"] = v.z1;
        if (std::isfinite(v.z2)) doc["z2"] = v.z2;
        doc["side_condition_ok"] = v.side_condition_ok;
    }
    const std::string text = doc.dump(2);
    if (!cli.out_dir.empty()) {
        write_file(ensure_out_dir(cli) / "oracle.json", text + "\n");
    }
    std::cout << text << "\n";
    return kExitOk;
}

int cmd_progressions(const CliOptions& cli) {
    const gl::RunConfig config = load_config(cli);
    const gl::ProgressionsRequest req =
        config.progressions ? *config.progressions : gl::ProgressionsRequest{};
    const auto make_spec = [&](double p) {
        return req.kind == "zeta1" ? gl::ZetaSpec::zeta1(req.lambda_side, req.lambda, p)
                                   : gl::ZetaSpec::zeta2(req.lambda_side, req.lambda, p);
    };
    const gl::ZetaSpec spec = make_spec(req.p);

    json doc;
    doc["spec"] = {{"kind", req.kind},
                   {"lambda_side", req.lambda_side},
                   {"lambda", req.lambda},
                   {"p", req.p}};
    doc["expected_log"] = spec.expected_log();
    doc["reciprocal_expected_log"] = spec.reciprocal().expected_log();

    const gl::EnumeratedDistributions dists = gl::enumerate_Fn_vs_Zn(spec, req.enum_n);
    doc["enumeration"] = {
        {"n", req.enum_n},
        {"match",
         gl::weighted_distributions_match(dists.f_n, dists.z_n_reciprocal, 1e-12)}};

    const gl::ZetaSpec neg = spec.expected_log() < 0.0 ? spec : spec.reciprocal();
    if (neg.expected_log() < 0.0) {
        double sum = 0.0;
        std::uint64_t unresolved = 0;
        for (std::uint64_t s = 0; s < req.samples; ++s) {
            gl::RngStream rng(config.seed, s);
            const gl::ProgressionSample z =
                gl::sample_Z(neg, config.tail_epsilon, config.max_terms, rng);
            sum += std::exp(-z.value);
            if (z.truncation_unresolved) ++unresolved;
        }
        doc["sample_Z"] = {
            {"via_reciprocal", neg.expected_log() != spec.expected_log()},
            {"samples", req.samples},
            {"mean_exp_neg_Z", sum / static_cast<double>(req.samples)},
            {"truncation_unresolved", unresolved}};
    }

    const gl::ZetaSpec pos = spec.expected_log() > 0.0 ? spec : spec.reciprocal();
    if (pos.expected_log() > 0.0) {
        double m_sum = 0.0;
        bool p3_ok = true;
        for (std::uint64_t s = 0; s < req.samples; ++s) {
            gl::RngStream rng(config.seed + 1, s);
            const gl::StoppedSample stop =
                gl::sample_Z_until_stopping(pos, req.gamma, rng);
            m_sum += static_cast<double>(stop.m_hat);
            p3_ok = p3_ok && (req.gamma * stop.z_before <= stop.f_before);
        }
        doc["stopping"] = {{"gamma", req.gamma},
                           {"samples", req.samples},
                           {"mean_m_hat", m_sum / static_cast<double>(req.samples)},
                           {"pathwise_p3_ok", p3_ok}};
    }

    const gl::DominanceReport dom =
        gl::dominance_check(make_spec(req.p), make_spec(req.p2), req.samples, config.seed + 2);
    doc["dominance"] = {{"p", req.p},
                        {"p2", req.p2},
                        {"est_p", dom.est_a},
                        {"se_p", dom.se_a},
                        {"est_p2", dom.est_b},
                        {"se_p2", dom.se_b},
                        {"via_reciprocal", dom.via_reciprocal},
                        {"predicted", dom.predicted},
                        {"holds_within_3se", dom.holds_within_3se}};

    const gl::EnvelopeReport env = gl::binomial_envelope_check(
        req.p, req.kappa, req.epsilon, req.horizon, req.samples, config.seed + 3);
    doc["envelope"] = {{"kappa", env.kappa},
                       {"epsilon", env.epsilon},
                       {"horizon", env.horizon},
                       {"c_grid", env.c_grid},
                       {"coverage", env.coverage},
                       {"found_c", env.found_c}};

    const std::string text = doc.dump(2);
    if (!cli.out_dir.empty()) {
        write_file(ensure_out_dir(cli) / "progressions.json", text + "\n");
    }
    std::cout << text << "\n";
    return kExitOk;
}

int cmd_verify(const CliOptions& cli) {
    gl::AcceptanceOptions options;
    if (cli.seed) options.master_seed = *cli.seed;
    const int failures = gl::run_acceptance_and_print(std::cout, options);
    return failures == 0 ? kExitOk : kExitAcceptance;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"growthlab: reinforced growth on a cycle graph - simulator and "
                 "verification toolkit"};
    app.require_subcommand(1);

    CliOptions cli;
    app.add_option("--config", cli.config_path, "JSON config file");
    app.add_option("--out", cli.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", "override config seed")->check(CLI::NonNegativeNumber);
    auto* runs_opt = app.add_option("--runs", "override config runs")->check(CLI::PositiveNumber);
    auto* steps_opt = app.add_option("--steps", "override config steps")->check(CLI::NonNegativeNumber);

    auto* simulate = app.add_subcommand("simulate", "run trajectory batches, emit JSON + CSV");
    auto* classify = app.add_subcommand("classify", "classify the lambda landscape as JSON");
    auto* oracle = app.add_subcommand("oracle", "evaluate a probability oracle as JSON");
    auto* progressions =
        app.add_subcommand("progressions", "random geometric progression suite as JSON");
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    for (CLI::App* sub : {simulate, classify, oracle, progressions, verify}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    if (seed_opt->count() > 0) cli.seed = seed_opt->as<std::uint64_t>();
    if (runs_opt->count() > 0) cli.runs = runs_opt->as<std::uint64_t>();
    if (steps_opt->count() > 0) cli.steps = steps_opt->as<std::uint64_t>();

    const bool needs_config = !verify->parsed();
    if (needs_config && cli.config_path.empty()) {
        std::cerr << "error: --config is required for this command\n";
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(cli);
        if (classify->parsed()) return cmd_classify(cli);
        if (oracle->parsed()) return cmd_oracle(cli);
        if (progressions->parsed()) return cmd_progressions(cli);
        if (verify->parsed()) return cmd_verify(cli);
    } catch (const gl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
