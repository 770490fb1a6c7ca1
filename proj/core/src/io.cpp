#include "growthlab/io.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace growthlab {

using nlohmann::json;

Params RunConfig::params() const { return make_params(lambdas); }

Config RunConfig::initial_config() const {
    if (x0.empty()) return zero_config(n_sites);
    return make_config(x0, params());
}

namespace {

void reject_unknown_fields(const json& obj, const std::set<std::string>& known,
                           const std::string& scope) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.contains(it.key())) {
            throw ConfigError("unknown field: " + scope + it.key());
        }
    }
}

std::uint64_t get_u64(const json& obj, const std::string& key, std::uint64_t fallback,
                      std::uint64_t min_value = 0) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError(key + " must be a non-negative integer");
    }
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        throw ConfigError(key + " must be a non-negative integer");
    }
    const std::uint64_t out = v.get<std::uint64_t>();
    if (out < min_value) {
        throw ConfigError(key + " must be >= " + std::to_string(min_value));
    }
    return out;
}

double get_positive_real(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(key + " must be a positive real");
    const double out = v.get<double>();
    if (!(out > 0.0) || !std::isfinite(out)) {
        throw ConfigError(key + " must be a positive real");
    }
    return out;
}

OracleRequest parse_oracle(const json& obj) {
    reject_unknown_fields(obj, {"op", "k", "n", "samples", "tol"}, "oracle.");
    OracleRequest req;
    if (obj.contains("op")) {
        if (!obj.at("op").is_string()) throw ConfigError("oracle.op must be a string");
        req.op = obj.at("op").get<std::string>();
    }
    static const std::set<std::string> kOps = {
        "single_site_stick", "escape_bound",    "pair_stick_mc",
        "pair_stick_upper_mc", "relocation_time", "regime"};
    if (!kOps.contains(req.op)) throw ConfigError("oracle.op is not a known operation");
    req.k = static_cast<int>(get_u64(obj, "k", 1, 1));
    req.n = get_u64(obj, "n", req.n);
    req.samples = get_u64(obj, "samples", req.samples, 1);
    req.tol = get_positive_real(obj, "tol", req.tol);
    return req;
}

ProgressionsRequest parse_progressions(const json& obj) {
    reject_unknown_fields(obj,
                          {"kind", "lambda_side", "lambda", "p", "p2", "gamma", "enum_n",
                           "samples", "kappa", "epsilon", "horizon"},
                          "progressions.");
    ProgressionsRequest req;
    if (obj.contains("kind")) {
        if (!obj.at("kind").is_string()) {
            throw ConfigError("progressions.kind must be a string");
        }
        req.kind = obj.at("kind").get<std::string>();
        if (req.kind != "zeta1" && req.kind != "zeta2") {
            throw ConfigError("progressions.kind must be zeta1 or zeta2");
        }
    }
    req.lambda_side = get_positive_real(obj, "lambda_side", req.lambda_side);
    req.lambda = get_positive_real(obj, "lambda", req.lambda);
    auto get_prob = [&](const std::string& key, double fallback) {
        const double v = get_positive_real(obj, key, fallback);
        if (!(v < 1.0)) throw ConfigError("progressions." + key + " must lie in (0,1)");
        return v;
    };
    req.p = get_prob("p", req.p);
    req.p2 = get_prob("p2", req.p2);
    req.gamma = get_prob("gamma", req.gamma);
    req.enum_n = static_cast<int>(get_u64(obj, "enum_n", static_cast<std::uint64_t>(req.enum_n), 1));
    if (req.enum_n > 12) throw ConfigError("progressions.enum_n must be <= 12");
    req.samples = get_u64(obj, "samples", req.samples, 1);
    req.kappa = get_positive_real(obj, "kappa", req.kappa);
    req.epsilon = get_prob("epsilon", req.epsilon);
    req.horizon = get_u64(obj, "horizon", req.horizon, 1);
    return req;
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_fields(doc,
                          {"n_sites", "lambdas", "x0", "steps", "runs", "seed", "window",
                           "cert_threshold", "tail_epsilon", "max_terms", "oracle",
                           "progressions"},
                          "");

    RunConfig config;
    if (!doc.contains("n_sites")) throw ConfigError("n_sites is required");
    if (!doc.at("n_sites").is_number_integer() && !doc.at("n_sites").is_number_unsigned()) {
        throw ConfigError("n_sites must be an integer");
    }
    const std::int64_t n = doc.at("n_sites").get<std::int64_t>();
    if (n < 4) throw ConfigError("n_sites must be >= 4");
    config.n_sites = static_cast<int>(n);

    if (!doc.contains("lambdas")) throw ConfigError("lambdas is required");
    const json& lam = doc.at("lambdas");
    if (!lam.is_array()) throw ConfigError("lambdas must be an array");
    if (static_cast<std::int64_t>(lam.size()) != n) {
        throw ConfigError("lambdas length must equal n_sites");
    }
    config.lambdas.reserve(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        if (!lam[i].is_number()) {
            throw ConfigError("lambdas[" + std::to_string(i + 1) + "] must be a number");
        }
        const double v = lam[i].get<double>();
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError("lambdas[" + std::to_string(i + 1) +
                              "] must be a positive finite real");
        }
        config.lambdas.push_back(v);
    }

    if (doc.contains("x0")) {
        const json& x0 = doc.at("x0");
        if (!x0.is_array()) throw ConfigError("x0 must be an array");
        if (static_cast<std::int64_t>(x0.size()) != n) {
            throw ConfigError("x0 length must equal n_sites");
        }
        config.x0.reserve(x0.size());
        for (std::size_t i = 0; i < x0.size(); ++i) {
            const std::string name = "x0[" + std::to_string(i + 1) + "]";
            if (!x0[i].is_number_integer() && !x0[i].is_number_unsigned()) {
                throw ConfigError(name + " must be a non-negative integer");
            }
            if (x0[i].is_number_integer() && x0[i].get<std::int64_t>() < 0) {
                throw ConfigError(name + " must be a non-negative integer");
            }
            const std::uint64_t c = x0[i].get<std::uint64_t>();
            if (c >= kCountCap) throw ConfigError(name + " exceeds the count cap 2^40");
            config.x0.push_back(c);
        }
    }

    config.steps = get_u64(doc, "steps", config.steps);
    config.runs = get_u64(doc, "runs", config.runs, 1);
    config.seed = get_u64(doc, "seed", config.seed);
    config.window = static_cast<int>(get_u64(doc, "window", static_cast<std::uint64_t>(config.window), 1));
    config.cert_threshold = get_positive_real(doc, "cert_threshold", config.cert_threshold);
    config.tail_epsilon = get_positive_real(doc, "tail_epsilon", config.tail_epsilon);
    config.max_terms = get_u64(doc, "max_terms", config.max_terms, 1);

    if (doc.contains("oracle")) {
        if (!doc.at("oracle").is_object()) throw ConfigError("oracle must be an object");
        config.oracle = parse_oracle(doc.at("oracle"));
        if (config.oracle->k > config.n_sites) {
            throw ConfigError("oracle.k must be <= n_sites");
        }
    }
    if (doc.contains("progressions")) {
        if (!doc.at("progressions").is_object()) {
            throw ConfigError("progressions must be an object");
        }
        config.progressions = parse_progressions(doc.at("progressions"));
    }
    return config;
}

std::string landscape_json(const Params& params, const LandscapeReport& report) {
    json features = json::array();
    for (const SiteFeature& f : report.features) {
        json item;
        item["kind"] = to_string(f.kind);
        json sites = json::array();
        for (int s : f.sites) sites.push_back(s + 1);
        item["sites"] = sites;
        if (f.min2_type) item["type"] = (*f.min2_type == PairType::Type1) ? 1 : 2;
        if (f.z1) item["z1"] = *f.z1;
        if (f.z2) item["z2"] = *f.z2;
        features.push_back(item);
    }
    json doc;
    doc["n_sites"] = params.n_sites();
    doc["lambdas"] = params.lambdas;
    doc["features"] = features;
    return doc.dump(2);
}

std::string batch_report_json(const BatchReport& report) {
    json doc;
    doc["runs"] = report.runs;
    doc["master_seed"] = report.master_seed;
    doc["verdicts"] = report.verdict_histogram;
    json sites = json::object();
    for (const auto& [site, count] : report.site_histogram) {
        sites[std::to_string(site + 1)] = count;
    }
    doc["localization_sites"] = sites;
    json rs = json::object();
    for (const auto& [r, count] : report.r_histogram) {
        rs[std::to_string(r)] = count;
    }
    doc["R_histogram"] = rs;
    doc["mean_abs_ratio_error"] = report.mean_abs_ratio_error;
    return doc.dump(2);
}

} // namespace growthlab
