// SPDX-License-Identifier: Apache-2.0
#include "subexp/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "subexp/capacity_dp.hpp"
#include "subexp/errors.hpp"

namespace subexp {

using nlohmann::json;

namespace {

const AmbiguitySet& require_model(const RunConfig& c) {
    if (!c.model) throw SchemaError("model: required field missing");
    return *c.model;
}

LatticeModel require_lattice(const RunConfig& c, const char* what) {
    const AmbiguitySet& set = require_model(c);
    if (!c.quantum) throw ValueError(std::string(what) + " requires model.quantum");
    return LatticeModel(set, *c.quantum);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValueError("cannot write " + path.string());
    out << text;
}

}  // namespace

std::string run_id(const RunConfig& config) {
    json identity = config.resolved;
    identity.erase("output_dir");
    identity.erase("threads");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : identity.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentResult execute(const RunConfig& c) {
    const std::string& e = c.experiment;
    if (e == "slln") {
        SllnOptions o;
        o.horizon = c.count("N");
        o.seeds = c.seeds;
        o.targets = c.numbers("targets");
        o.tolerance = c.number("tolerance");
        o.oscillation_tolerance = c.number("oscillation_tolerance");
        o.burn_in_fraction = c.number("burn_in_fraction");
        o.threads = c.threads;
        return run_slln(require_model(c), o);
    }
    if (e == "divergence") {
        DivergenceOptions o;
        o.horizons = c.counts("N_grid");
        o.seeds = c.seeds;
        o.threads = c.threads;
        return run_divergence(require_model(c), o);
    }
    if (e == "marcinkiewicz") {
        MarcinkiewiczOptions o;
        o.horizon = c.count("N");
        o.p = c.number("p");
        o.band = c.number("band");
        o.burn_in_fraction = c.number("burn_in_fraction");
        o.seeds = c.seeds;
        o.threads = c.threads;
        return run_marcinkiewicz(require_model(c), o);
    }
    if (e == "weak_lln") {
        WeakLlnOptions o;
        const bool exact = c.parameters.at("mode") == "exact";
        o.mode = exact ? WeakLlnOptions::Mode::Exact : WeakLlnOptions::Mode::MonteCarlo;
        o.n_grid = c.counts("n_grid");
        o.epsilon = c.number("epsilon");
        o.capacity_threshold = c.number("capacity_threshold");
        o.interior_threshold = c.number("interior_threshold");
        o.bank_tolerance = c.number("bank_tolerance");
        o.replications = c.count("replications");
        o.seeds = c.seeds;
        o.threads = c.threads;
        if (!exact) return run_weak_lln_monte_carlo(require_model(c), o);
        if (require_model(c).dimension() != 1) throw UnsupportedMode("exact mode requires d=1");
        if (c.parameters.at("interior_target").is_null())
            throw ValueError("parameters.interior_target: no mean interval to take a midpoint from");
        o.interior_target = c.number("interior_target");
        return run_weak_lln_exact(require_lattice(c, "exact mode"), o);
    }
    if (e == "three_series") {
        ThreeSeriesOptions o;
        o.exponent = c.number("exponent");
        o.c = c.number("c");
        o.horizon = c.count("N");
        o.settle = c.count("N0");
        o.tolerance = c.number("tolerance");
        o.seeds = c.seeds;
        o.threads = c.threads;
        return run_three_series(require_model(c), o);
    }
    if (e == "cluster_set") {
        ClusterSetOptions o;
        o.horizon = c.count("N");
        o.targets = c.count("m");
        o.delta = c.number("delta");
        o.outer_tolerance = c.number("tol_outer");
        o.hausdorff_tolerance = c.number("tol_hausdorff");
        o.block_ratio = c.number("block_ratio");
        o.check_stride = c.count("check_stride");
        o.seeds = c.seeds;
        o.threads = c.threads;
        return run_cluster_set(require_model(c), o);
    }
    if (e == "inequality_grid") {
        InequalityGridOptions o;
        o.n_grid = c.counts("n_grid");
        o.x_grid = c.numbers("x_grid");
        o.alphas = c.numbers("alphas");
        o.exponential = c.parameters.at("exponential").get<bool>();
        o.threads = c.threads;
        return run_inequality_grid(require_lattice(c, "inequality_grid"), o);
    }
    if (e == "choquet_series") {
        const AmbiguitySet& set = require_model(c);
        if (set.size() != 1) throw ValueError("model.members: choquet_series needs exactly one member");
        ChoquetSeriesOptions o;
        o.p = c.number("p");
        o.scale_m = c.number("M");
        o.terms = c.count("K");
        return run_choquet_series(set.member(0), o);
    }
    if (e == "axioms") {
        AxiomOptions o;
        o.trials = c.count("trials");
        o.tolerance = c.number("tolerance");
        o.seed = c.seeds.front();
        o.threads = c.threads;
        return run_axioms(o);
    }
    throw ValueError("experiment: unknown experiment id \"" + e + "\"");
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string results_csv(const ExperimentResult& r, const std::string& id) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& row : r.rows) {
        os << id << ',' << csv_field(r.experiment) << ',' << csv_field(row.strategy) << ',' << row.seed << ','
           << row.n << ',' << csv_field(row.statistic) << ',' << format_double(row.value) << ','
           << format_double(row.tolerance) << ',' << to_string(row.verdict) << '\n';
    }
    return os.str();
}

json results_json(const ExperimentResult& r, const std::string& id) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"strategy", row.strategy},
                        {"seed", row.seed},
                        {"n", row.n},
                        {"statistic", row.statistic},
                        {"value", row.value},
                        {"tolerance", row.tolerance},
                        {"verdict", to_string(row.verdict)}});
    }
    return {{"run_id", id},
            {"experiment", r.experiment},
            {"model", r.model},
            {"strategies", r.strategies},
            {"n_grid", r.n_grid},
            {"seeds", r.seeds},
            {"notes", r.notes},
            {"failures", r.failures()},
            {"passed", r.passed()},
            {"rows", rows}};
}

void write_failure(const std::string& dir, const std::string& kind, const std::string& message) {
    std::filesystem::create_directories(dir);
    write_file(std::filesystem::path(dir) / "failure.json",
               json{{"error", kind}, {"message", message}}.dump(2) + "\n");
}

int run(const RunConfig& config, std::ostream& log) {
    const std::filesystem::path dir(config.output_dir);
    try {
        std::filesystem::create_directories(dir);
        const std::string id = run_id(config);
        write_file(dir / "resolved_config.json", config.resolved.dump(2) + "\n");
        const auto start = std::chrono::steady_clock::now();
        const ExperimentResult result = execute(config);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_file(dir / "results.csv", results_csv(result, id));
        write_file(dir / "results.json", results_json(result, id).dump(2) + "\n");
        std::filesystem::remove(dir / "failure.json");
        log << result.experiment << " run " << id << ": " << result.rows.size() << " rows, " << result.failures()
            << " failed, " << secs << " s -> " << dir.string() << '\n';
        return result.passed() ? kExitPass : kExitFail;
    } catch (const Error& e) {
        write_failure(dir.string(), e.kind(), e.what());
        log << e.kind() << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        write_failure(dir.string(), "InternalError", e.what());
        log << "InternalError: " << e.what() << '\n';
    }
    return kExitError;
}

}  // namespace subexp
