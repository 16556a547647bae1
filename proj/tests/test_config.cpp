// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "subexp/config.hpp"
#include "subexp/errors.hpp"
#include "subexp/runner.hpp"

using namespace subexp;
using nlohmann::json;

namespace {

const char* kE1Model = R"({
  "label": "E1",
  "quantum": 1,
  "members": [
    {"name": "P1", "atoms": [{"value": -1, "weight": 0.5}, {"value": 1, "weight": 0.5}]},
    {"name": "P2", "atoms": [{"value": -1, "weight": 0.25}, {"value": 1, "weight": 0.75}]}
  ]
})";

json doc(const std::string& experiment) {
    return {{"experiment", experiment}, {"model", json::parse(kE1Model)}};
}

std::string error_message(const json& d) {
    try {
        parse_config(d);
    } catch (const Error& e) {
        return e.kind() + ": " + e.what();
    }
    return "no error";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("subexp_test_config_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("defaults are written out") {
    const auto c = parse_config(doc("slln"));
    CHECK(c.experiment == "slln");
    CHECK(c.count("N") == 1'000'000);
    CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(c.threads == 1);
    CHECK(c.output_dir == "results");
    CHECK(c.resolved["parameters"]["tolerance"] == 0.01);
    CHECK(c.resolved["model"]["members"][0]["name"] == "P1");
    CHECK(c.quantum.value() == 1.0);
    REQUIRE(c.model.has_value());
    CHECK(c.model->size() == 2);
}

TEST_CASE("resolved configs parse to themselves") {
    for (const auto& id : experiment_ids()) {
        CAPTURE(id);
        json d = id == "choquet_series" ? json{{"experiment", id},
                                               {"model", {{"members", {{{"pareto", {{"alpha", 1.5}}}}}}}}}
                                         : doc(id);
        if (id == "weak_lln") d["parameters"] = {{"interior_target", 0.25}};
        const auto first = parse_config(d);
        const auto second = parse_config(first.resolved);
        CHECK(first.resolved == second.resolved);
    }
}

TEST_CASE("unknown fields name their path") {
    json d = doc("slln");
    d["modle"] = 1;
    CHECK(error_message(d) == "SchemaError: modle: unknown field");

    d = doc("slln");
    d["model"]["members"][1]["atomz"] = json::array();
    CHECK(error_message(d).rfind("SchemaError: model.members[1].atomz", 0) == 0);

    d = doc("slln");
    d["parameters"] = {{"horizon", 10}};
    CHECK(error_message(d).rfind("SchemaError: parameters.horizon", 0) == 0);

    d = doc("slln");
    d["model"]["members"][0]["atoms"][1]["wieght"] = 0.5;
    CHECK(error_message(d).rfind("SchemaError: model.members[0].atoms[1].wieght", 0) == 0);
}

TEST_CASE("mistyped fields are schema errors") {
    json d = doc("slln");
    d["parameters"] = {{"N", "big"}};
    CHECK(error_message(d).rfind("SchemaError: parameters.N", 0) == 0);
    d = doc("slln");
    d["seeds"] = 4;
    CHECK(error_message(d).rfind("SchemaError: seeds", 0) == 0);
    d = doc("inequality_grid");
    d["parameters"] = {{"exponential", 1}};
    CHECK(error_message(d).rfind("SchemaError: parameters.exponential", 0) == 0);
    CHECK_THROWS_AS(parse_config(std::string("{not json")), SchemaError);
    CHECK(error_message(json{{"model", json::parse(kE1Model)}}).rfind("SchemaError: experiment", 0) == 0);
}

TEST_CASE("out-of-range values are value errors") {
    json d = doc("slln");
    d["model"]["members"][0]["atoms"][0]["weight"] = 0.49;
    const auto msg = error_message(d);
    CHECK(msg.rfind("ValueError: model.members[0]", 0) == 0);

    d = doc("slln");
    d["experiment"] = "sln";
    CHECK(error_message(d).rfind("ValueError: experiment", 0) == 0);
    d = doc("weak_lln");
    d["parameters"] = {{"mode", "approximate"}};
    CHECK(error_message(d).rfind("ValueError: parameters.mode", 0) == 0);
    d = doc("slln");
    d["threads"] = 0;
    CHECK(error_message(d).rfind("ValueError: threads", 0) == 0);
    d = doc("slln");
    d["model"]["quantum"] = -1;
    CHECK(error_message(d).rfind("ValueError: model.quantum", 0) == 0);
}

TEST_CASE("axioms need no model") {
    const auto c = parse_config(json{{"experiment", "axioms"}, {"parameters", {{"trials", 10}}}});
    CHECK_FALSE(c.model.has_value());
    CHECK(c.count("trials") == 10);
}

TEST_CASE("models round-trip through json") {
    const auto c = parse_config(doc("slln"));
    const auto again = parse_config(json{{"experiment", "slln"}, {"model", model_to_json(*c.model, c.quantum)}});
    CHECK(again.resolved["model"] == c.resolved["model"]);
}

TEST_CASE("run ids ignore output location and threads") {
    auto a = parse_config(doc("slln"));
    auto b = parse_config(doc("slln"));
    b.set_threads(8);
    b.set_output_dir("elsewhere");
    CHECK(run_id(a) == run_id(b));
    CHECK(run_id(a).size() == 16);
    b.override_seed(9);
    CHECK(b.seeds == std::vector<std::uint64_t>{9});
    CHECK(b.resolved["seeds"] == json::array({9}));
    CHECK(run_id(a) != run_id(b));
}

TEST_CASE("csv formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(0.5) == "0.5");
    ExperimentResult r;
    r.experiment = "slln";
    r.check("target=0.25", 3, 1000, "|S_N/N-b|", 0.004, 0.01);
    r.info("a,b", 3, 1000, "note", 1.0);
    const auto csv = results_csv(r, "abc");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == kCsvHeader);
    std::getline(in, line);
    CHECK(line == "abc,slln,target=0.25,3,1000,|S_N/N-b|,0.0040000000000000001,0.01,pass");
    std::getline(in, line);
    CHECK(line.rfind("abc,slln,\"a,b\",3,1000,note,1,", 0) == 0);
    CHECK(line.substr(line.size() - 4) == "info");
}

TEST_CASE("runs write their artifacts and exit codes") {
    const auto ok_dir = scratch("ok");
    auto ok = parse_config(json{{"experiment", "axioms"}, {"parameters", {{"trials", 20}}}});
    ok.set_output_dir(ok_dir.string());
    std::ostringstream log;
    CHECK(run(ok, log) == kExitPass);
    CHECK(std::filesystem::exists(ok_dir / "results.csv"));
    CHECK(std::filesystem::exists(ok_dir / "results.json"));
    CHECK(std::filesystem::exists(ok_dir / "resolved_config.json"));
    CHECK(json::parse(slurp(ok_dir / "resolved_config.json")) == ok.resolved);
    const auto results = json::parse(slurp(ok_dir / "results.json"));
    CHECK(results["passed"] == true);
    CHECK(results["rows"].size() == 20);

    const auto fail_dir = scratch("fail");
    json d = doc("slln");
    d["parameters"] = {{"N", 2000}, {"tolerance", 1e-9}};
    d["seeds"] = {1};
    auto failing = parse_config(d);
    failing.set_output_dir(fail_dir.string());
    CHECK(run(failing, log) == kExitFail);
    CHECK(slurp(fail_dir / "results.csv").find(",fail\n") != std::string::npos);

    const auto err_dir = scratch("err");
    json e = doc("choquet_series");
    auto erroring = parse_config(e);
    erroring.set_output_dir(err_dir.string());
    CHECK(run(erroring, log) == kExitError);
    const auto failure = json::parse(slurp(err_dir / "failure.json"));
    CHECK(failure["error"] == "ValueError");
}
