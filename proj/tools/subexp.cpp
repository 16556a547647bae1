// SPDX-License-Identifier: Apache-2.0
// Command-line front end: run, check-axioms, inequality-grid.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "subexp/config.hpp"
#include "subexp/errors.hpp"
#include "subexp/runner.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--out", o.out, "Output directory (overrides output_dir)");
    cmd->add_option("--threads", o.threads, "Worker threads (results do not depend on this)")
        ->check(CLI::Range(1u, 1024u));
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw subexp::ValueError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw subexp::SchemaError(std::string("<root>: malformed JSON: ") + e.what());
    }
}

int execute(const nlohmann::json& doc, const Overrides& o) {
    const std::string fallback_dir = o.out.value_or("results");
    try {
        auto config = subexp::parse_config(doc);
        if (o.seed) config.override_seed(*o.seed);
        if (o.out) config.set_output_dir(*o.out);
        if (o.threads) config.set_threads(*o.threads);
        return subexp::run(config, std::cerr);
    } catch (const subexp::Error& e) {
        subexp::write_failure(fallback_dir, e.kind(), e.what());
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return subexp::kExitError;
    }
}

int load_and_execute(const std::string& path, const Overrides& o, const char* force_experiment) {
    nlohmann::json doc;
    try {
        doc = read_json(path);
    } catch (const subexp::Error& e) {
        subexp::write_failure(o.out.value_or("results"), e.kind(), e.what());
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return subexp::kExitError;
    }
    if (force_experiment && doc.is_object() && doc.value("experiment", "") != force_experiment) {
        doc["experiment"] = force_experiment;
        doc.erase("parameters");
    }
    return execute(doc, o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sub-linear expectation experiment runner"};
    app.require_subcommand(1);

    Overrides run_o;
    std::string run_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", run_path, "Config path")->required()->check(CLI::ExistingFile);
    run->add_option("--seed-override", run_o.seed, "Replace the seed list with a single seed");
    add_overrides(run, run_o);

    Overrides axiom_o;
    std::size_t trials = 1000;
    std::uint64_t axiom_seed = 1;
    auto* axioms = app.add_subcommand("check-axioms", "Randomized axiom suite on finite ambiguity sets");
    axioms->add_option("--trials", trials, "Number of random sets")->check(CLI::PositiveNumber);
    axioms->add_option("--seed", axiom_seed, "Suite seed");
    add_overrides(axioms, axiom_o);

    Overrides grid_o;
    std::string grid_path;
    auto* grid = app.add_subcommand("inequality-grid",
                                    "Exact-DP inequality grid; a config for another experiment is reused "
                                    "for its model with default grid parameters");
    grid->add_option("config", grid_path, "Config path")->required()->check(CLI::ExistingFile);
    add_overrides(grid, grid_o);

    CLI11_PARSE(app, argc, argv);

    if (*run) return load_and_execute(run_path, run_o, nullptr);
    if (*grid) return load_and_execute(grid_path, grid_o, "inequality_grid");
    nlohmann::json doc{{"experiment", "axioms"},
                       {"parameters", {{"trials", trials}}},
                       {"seeds", {axiom_seed}},
                       {"output_dir", "results"}};
    return execute(doc, axiom_o);
}
