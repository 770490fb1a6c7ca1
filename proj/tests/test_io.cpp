#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include <json.hpp>

#include "growthlab/io.hpp"

using namespace growthlab;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("parse_config applies defaults") {
    const RunConfig c = parse_config(
        R"({"n_sites":4, "lambdas":[1,1,1,1], "steps":1000, "runs":10, "seed":7})");
    CHECK(c.n_sites == 4);
    CHECK(c.lambdas == std::vector<double>{1, 1, 1, 1});
    CHECK(c.x0.empty());
    CHECK(c.initial_config().counts == std::vector<std::uint64_t>{0, 0, 0, 0});
    CHECK(c.steps == 1000);
    CHECK(c.runs == 10);
    CHECK(c.seed == 7);
    CHECK(c.window == 2000);
    CHECK(c.cert_threshold == 1e-6);
    CHECK(c.tail_epsilon == 1e-9);
    CHECK(c.max_terms == 1'000'000);
}

TEST_CASE("parse_config rejections name the offending field") {
    CHECK(error_of(R"({"n_sites":3, "lambdas":[1,1,1]})").find("n_sites must be >= 4") !=
          std::string::npos);
    CHECK(error_of(R"({"n_sites":4, "lambdas":[1,2,-1,1]})").find("lambdas[3]") !=
          std::string::npos);
    CHECK(error_of(R"({"n_sites":4, "lambdas":[1,2,1]})")
              .find("lambdas length must equal n_sites") != std::string::npos);
    CHECK(error_of(R"({"n_sites":4, "lambdas":[1,1,1,1], "x0":[0,-2,0,0]})")
              .find("x0[2]") != std::string::npos);
    CHECK(error_of(R"({"n_sites":4, "lambdas":[1,1,1,1], "bogus":1})")
              .find("unknown field: bogus") != std::string::npos);
    CHECK(error_of(R"({"n_sites":4, "lambdas":[1,1,1,1], "oracle":{"op":"nope"}})")
              .find("oracle.op") != std::string::npos);
    CHECK(error_of("{not json").find("malformed JSON") != std::string::npos);
    CHECK(error_of(R"({"lambdas":[1,1,1,1]})").find("n_sites is required") !=
          std::string::npos);
}

TEST_CASE("parse_config nested requests") {
    const RunConfig c = parse_config(R"({
        "n_sites": 5,
        "lambdas": [0.5, 1.0, 1.0, 2.0, 0.7],
        "x0": [1, 0, 0, 0, 0],
        "oracle": {"op": "pair_stick_mc", "k": 2, "n": 20, "samples": 500},
        "progressions": {"kind": "zeta2", "lambda_side": 2.0, "p": 0.1}
    })");
    REQUIRE(c.oracle.has_value());
    CHECK(c.oracle->op == "pair_stick_mc");
    CHECK(c.oracle->k == 2);
    CHECK(c.oracle->n == 20);
    REQUIRE(c.progressions.has_value());
    CHECK(c.progressions->p == 0.1);
    CHECK(c.initial_config().counts[0] == 1);
}

TEST_CASE("landscape_json lists features with 1-based sites") {
    const Params p = make_params({1.0, 3.0, 1.0, 1.0});
    const auto doc = nlohmann::json::parse(landscape_json(p, classify(p)));
    CHECK(doc.at("n_sites") == 4);
    bool found_max_at_2 = false;
    for (const auto& f : doc.at("features")) {
        if (f.at("kind") == "local_maximum" &&
            f.at("sites") == nlohmann::json::array({2})) {
            found_max_at_2 = true;
        }
    }
    CHECK(found_max_at_2);
}

TEST_CASE("csv format") {
    const Params p = make_params({1, 1, 1, 1});
    BatchOptions options;
    options.runs = 8;
    options.steps = 6'000;
    options.master_seed = 42;
    options.window = 1'000;
    const BatchReport report = run_batch(p, zero_config(4), options);
    const std::string csv = batch_csv(report);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "run_id,seed,verdict,site,certified,residual_bound,R,ratio,predicted_ratio,"
          "steps_executed");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.find("pair") != std::string::npos);
        // ratio column round-trips through strtod exactly (17 significant digits)
        std::size_t start = 0;
        for (int c = 0; c < 7; ++c) start = line.find(',', start) + 1;
        const std::string ratio_text = line.substr(start, line.find(',', start) - start);
        const double parsed = std::strtod(ratio_text.c_str(), nullptr);
        char round_trip[40];
        std::snprintf(round_trip, sizeof round_trip, "%.17g", parsed);
        CHECK(ratio_text == round_trip);
    }
    CHECK(rows == 8);
    const auto doc = nlohmann::json::parse(batch_report_json(report));
    CHECK(doc.at("runs") == 8);
    CHECK(doc.at("verdicts").at("pair") == 8);
}
