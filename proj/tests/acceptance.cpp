// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes or the only failures are
// listed in kKnownUnattainable (documented in README.md).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "models.hpp"
#include "subexp/capacity_dp.hpp"
#include "subexp/errors.hpp"
#include "subexp/experiments.hpp"
#include "subexp/sampler.hpp"

using namespace subexp;
namespace fs = std::filesystem;

namespace {

// Criterion 6 asks for V(dist(S_256/256, [0, 0.5]) >= 0.1) <= 0.05 on E1.
// Under the single member P1 alone that probability is already 0.0590, so
// no correct upper capacity can meet the threshold.
const std::set<int> kKnownUnattainable{6};

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const StatRow* row(const ExperimentResult& r, const std::string& strategy, const std::string& stat,
                   std::uint64_t seed = 0) {
    return r.find(strategy, stat, seed);
}

void require_passed(Outcome& o, const ExperimentResult& r, const std::string& label) {
    if (r.passed()) return;
    for (const auto& x : r.rows)
        if (x.verdict == Verdict::Fail) {
            o.require(false, label + " " + x.strategy + " " + x.statistic + "=" + num(x.value) + " > " + num(x.tolerance));
            return;
        }
}

Outcome axioms() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    AxiomOptions opt;
    opt.trials = 1000;
    const auto r = run_axioms(opt);
    double worst = 0.0;
    for (const auto& x : r.rows) worst = std::max(worst, x.value);
    const double secs = seconds_since(t0);
    o.require(r.rows.size() == 1000, "expected 1000 trials");
    require_passed(o, r, "axiom");
    o.require(secs < 60.0, "runtime " + num(secs) + " s");
    o.detail = o.pass ? "1000 sets, max violation " + num(worst) + ", " + num(secs) + " s" : o.detail;
    return o;
}

Outcome dp_oracle() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const LatticeModel e1(testing::e1(), 1.0);
    const auto two = PathFunctional::terminal_event(2, Interval::at_least(2.0));
    o.require(std::abs(dp_value(e1, two, Mode::Upper) - 0.5625) <= 1e-12, "E1 upper S_2>=2");
    o.require(std::abs(dp_value(e1, two, Mode::Lower) - 0.25) <= 1e-12, "E1 lower S_2>=2");
    o.require(std::abs(brute_force_value(e1, two, Mode::Upper) - 0.5625) <= 1e-12, "oracle upper S_2>=2");
    o.require(std::abs(brute_force_value(e1, two, Mode::Lower) - 0.25) <= 1e-12, "oracle lower S_2>=2");

    std::mt19937_64 rng(314159);
    std::uniform_int_distribution<int> members(1, 3), horizon(1, 3), level(-3, 3), kind(0, 3);
    double worst = 0.0;
    int instances = 0;
    for (int trial = 0; trial < 250; ++trial) {
        const auto set = testing::random_lattice_set(rng, members(rng), -2, 2, 3);
        const LatticeModel model(set, 1.0);
        const std::size_t n = horizon(rng);
        PathFunctional f;
        switch (kind(rng)) {
            case 0: f = PathFunctional::terminal_event(n, Interval::at_least(level(rng))); break;
            case 1: f = PathFunctional::running_max(n, 1 + std::abs(level(rng)), false); break;
            case 2: f = PathFunctional::running_max(n, 1 + std::abs(level(rng)), true); break;
            default: {
                const double c = level(rng);
                f = PathFunctional::terminal_sum(n, [c](double s) { return std::exp(-(s - c) * (s - c) / 4.0); });
            }
        }
        for (Mode mode : {Mode::Upper, Mode::Lower})
            worst = std::max(worst, std::abs(dp_value(model, f, mode) - brute_force_value(model, f, mode)));
        ++instances;
    }
    const double secs = seconds_since(t0);
    o.require(worst <= 1e-12, "max |dp - oracle| = " + num(worst));
    o.require(secs < 120.0, "runtime " + num(secs) + " s");
    if (o.pass) o.detail = std::to_string(instances) + " instances, max |dp - oracle| " + num(worst);
    return o;
}

Outcome inequality_grid() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    InequalityGridOptions opt;
    std::size_t rows = 0;
    const AmbiguitySet skew({Distribution::finite1d({{-1.0, 0.5}, {1.0, 0.5}}),
                             Distribution::finite1d({{-1.0, 0.4}, {0.0, 0.2}, {2.0, 0.4}})},
                            "E1-skew");
    for (const auto& model : {LatticeModel(testing::e1(), 1.0), LatticeModel(skew, 1.0)}) {
        const auto r = run_inequality_grid(model, opt);
        rows += r.rows.size();
        require_passed(o, r, model.set().label());
    }
    const double secs = seconds_since(t0);
    o.require(opt.x_grid.size() >= 8, "x grid too small");
    o.require(secs < 300.0, "runtime " + num(secs) + " s");
    if (o.pass) o.detail = std::to_string(rows) + " bound checks, 0 violations, " + num(secs) + " s";
    return o;
}

ExperimentResult slln_result() {
    SllnOptions opt;
    opt.targets = {0.0, 0.125, 0.25, 0.375, 0.5, 0.7};
    return run_slln(testing::e1(), opt);
}

Outcome slln_endpoints(const ExperimentResult& r, double secs) {
    Outcome o;
    double hi = 1.0, lo = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto* mx = row(r, "max", "|S_N/N-limit|", seed);
        const auto* mn = row(r, "min", "|S_N/N-limit|", seed);
        const auto* rmax = row(r, "oscillation", "running_max_S_n/n", seed);
        const auto* rmin = row(r, "oscillation", "running_min_S_n/n", seed);
        if (!mx || !mn || !rmax || !rmin) {
            o.require(false, "missing rows for seed " + std::to_string(seed));
            continue;
        }
        o.require(mx->value <= 0.01, "max seed " + std::to_string(seed) + " off by " + num(mx->value));
        o.require(mn->value <= 0.01, "min seed " + std::to_string(seed) + " off by " + num(mn->value));
        o.require(rmax->value >= 0.45, "running max " + num(rmax->value));
        o.require(rmin->value <= 0.05, "running min " + num(rmin->value));
        hi = std::min(hi, rmax->value);
        lo = std::max(lo, rmin->value);
    }
    o.require(secs < 60.0, "runtime " + num(secs) + " s");
    if (o.pass) o.detail = "running max >= " + num(hi) + ", running min <= " + num(lo) + ", " + num(secs) + " s";
    return o;
}

Outcome slln_targets(const ExperimentResult& r) {
    Outcome o;
    double worst = 0.0;
    for (const char* b : {"0", "0.125", "0.25", "0.375", "0.5"})
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto* x = row(r, std::string("target=") + b, "|S_N/N-limit|", seed);
            if (!x) {
                o.require(false, std::string("missing target ") + b);
                continue;
            }
            worst = std::max(worst, x->value);
            o.require(x->value <= 0.01, std::string("target ") + b + " off by " + num(x->value));
        }
    bool rejected = false;
    try {
        stationary_for_target(testing::e1(), 0.7);
    } catch (const TargetOutOfRange&) {
        rejected = true;
    }
    o.require(rejected, "0.7 not rejected");
    o.require(row(r, "target=0.7", "target_out_of_range") != nullptr, "0.7 not reported");
    if (o.pass) o.detail = "max |S_N/N - b| " + num(worst) + ", 0.7 raises TargetOutOfRange";
    return o;
}

Outcome weak_lln() {
    Outcome o;
    const auto r = run_weak_lln_exact(LatticeModel(testing::e1(), 1.0), WeakLlnOptions{});
    double previous = 2.0, last = 0.0;
    for (const auto& x : r.rows)
        if (x.statistic == "V(dist(S_n/n,M)>=eps)") {
            o.require(x.value <= previous + 1e-12, "capacity increases at n=" + std::to_string(x.n));
            previous = last = x.value;
        }
    o.require(std::abs(last - 0.061367389703750184) <= 1e-13, "regression constant changed: " + num(last));
    double bank = 0.0;
    for (const auto& x : r.rows)
        if (x.statistic.rfind("|E[", 0) == 0) {
            bank = std::max(bank, x.value);
            o.require(x.value <= 0.05, x.statistic + "=" + num(x.value));
        }
    o.require(last <= 0.05, "V(dist >= 0.1) at n=256 is " + num(last) + " > 0.05");
    if (o.pass) o.detail = "V at n=256 " + num(last) + ", bank deviation " + num(bank);
    else o.detail += " (nonincreasing over n; test bank max deviation " + num(bank) + ")";
    return o;
}

Outcome marcinkiewicz() {
    Outcome o;
    const auto r = run_marcinkiewicz(testing::e1(), MarcinkiewiczOptions{});
    require_passed(o, r, "E1");
    double worst = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto* x = row(r, "max", "sup_|S_n-n*upper|/n^(1/p)", seed);
        if (!x) {
            o.require(false, "missing max rows");
            break;
        }
        worst = std::max(worst, x->value);
        o.require(x->value <= 0.5, "seed " + std::to_string(seed) + " sup " + num(x->value));
    }
    MarcinkiewiczOptions control;
    control.horizon = 100'000;
    const auto c = run_marcinkiewicz(testing::pareto_singleton(1.2), control);
    const auto* violated = row(c, "-", "envelope_violated");
    o.require(violated && violated->value == 1.0, "control envelope not violated");
    if (o.pass)
        o.detail = "sup |S_n - 0.5n|/n^(2/3) = " + num(worst) + "; Pareto(1.2) control breaks the envelope (" +
                   num(row(c, "-", "largest_scaled_deviation")->value) + ")";
    return o;
}

Outcome three_series() {
    Outcome o;
    ThreeSeriesOptions opt;
    const auto r = run_three_series(testing::e1(), opt);
    require_passed(o, r, "n^-2");
    o.require(row(r, "-", "all_series_convergent")->value == 1.0, "n^-2 series not all convergent");
    std::set<std::string> strategies;
    double worst = 0.0;
    for (const auto& x : r.rows)
        if (x.statistic == "sup_|S_n-S_m|_after_N0") {
            strategies.insert(x.strategy);
            worst = std::max(worst, x.value);
            o.require(x.verdict == Verdict::Pass, x.strategy + " fluctuation " + num(x.value));
        }
    o.require(strategies.size() >= 4, "fewer than 4 strategies");
    opt.exponent = 1.0;
    const auto control = run_three_series(testing::e1(), opt);
    o.require(row(control, "-", "all_series_convergent")->value == 0.0, "n^-1 control reported convergent");
    if (o.pass)
        o.detail = "n^-2: convergent, fluctuation " + num(worst) + " over " + std::to_string(strategies.size()) +
                   " strategies; n^-1: non-convergent";
    return o;
}

Outcome choquet_series() {
    Outcome o;
    ChoquetSeriesOptions opt;
    const auto a = run_choquet_series(Distribution::pareto(1.5, 1.0, 0.5), opt);
    const double ca = row(a, "-", "choquet_|X|^p")->value;
    o.require(a.passed(), "Pareto(1.5) verdicts disagree");
    o.require(row(a, "-", "series_convergent")->value == 1.0, "Pareto(1.5) series not convergent");
    o.require(std::abs(ca - 3.0) <= 1e-6, "C_V(|X|) = " + num(ca));
    opt.p = 1.5;
    const auto b = run_choquet_series(Distribution::pareto(1.2, 1.0, 0.5), opt);
    o.require(b.passed(), "Pareto(1.2) verdicts disagree");
    o.require(row(b, "-", "series_convergent")->value == 0.0, "Pareto(1.2) series convergent");
    o.require(std::isinf(row(b, "-", "choquet_|X|^p")->value), "Pareto(1.2) Choquet finite");
    if (o.pass) o.detail = "Pareto(1.5): C_V(|X|) = " + num(ca) + " and series finite; Pareto(1.2), p=1.5: both infinite";
    return o;
}

Outcome cluster_set() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_cluster_set(testing::v2_mix(), ClusterSetOptions{});
    const double secs = seconds_since(t0);
    require_passed(o, r, "V2-mix");
    double worst = 0.0;
    int found = 0;
    for (const auto& x : r.rows)
        if (x.statistic == "hausdorff(visits,targets)") {
            worst = std::max(worst, x.value);
            ++found;
        }
    o.require(found == 3, "expected a Hausdorff row per seed");
    o.require(secs < 180.0, "runtime " + num(secs) + " s");
    if (o.pass) o.detail = "max Hausdorff " + num(worst) + ", outer containment holds, " + num(secs) + " s";
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome reproducibility() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "subexp_acceptance_repro";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path config = dir / "slln.json";
    std::ofstream(config) << R"({
  "experiment": "slln",
  "model": {"label": "E1", "members": [
    {"name": "P1", "atoms": [{"value": -1, "weight": 0.5}, {"value": 1, "weight": 0.5}]},
    {"name": "P2", "atoms": [{"value": -1, "weight": 0.25}, {"value": 1, "weight": 0.75}]}]},
  "parameters": {"N": 1000000, "targets": [0, 0.125, 0.25, 0.375, 0.5]},
  "seeds": [1, 2, 3]
})";
    std::vector<std::string> csvs;
    for (const char* threads : {"1", "8", "1", "8"}) {
        const fs::path out = dir / ("run" + std::to_string(csvs.size()));
        const std::string cmd = std::string(SUBEXP_CLI_PATH) + " run " + config.string() + " --threads " + threads +
                                " --out " + out.string() + " > " + (dir / "log.txt").string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        o.require(status == 0, "CLI run exited with status " + std::to_string(status));
        csvs.push_back(slurp(out / "results.csv"));
    }
    for (std::size_t i = 1; i < csvs.size(); ++i) o.require(csvs[i] == csvs[0], "results.csv differs in run " + std::to_string(i));
    o.require(!csvs[0].empty(), "empty results.csv");
    if (o.pass) o.detail = "4 CLI runs (threads 1, 8, 1, 8): results.csv byte-identical, " + std::to_string(csvs[0].size()) + " bytes";
    fs::remove_all(dir);
    return o;
}

}  // namespace

int main() {
    std::cout << "acceptance: criteria 1-11\n";
    std::vector<std::pair<int, Outcome>> results;
    auto record = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail;
        if (!o.pass && kKnownUnattainable.count(id)) std::cout << " [known unattainable, see README]";
        std::cout << std::endl;
        results.emplace_back(id, o);
    };

    record(1, "axiom suite", axioms);
    record(2, "DP-oracle equivalence", dp_oracle);
    record(3, "inequality grid", inequality_grid);
    const auto t0 = std::chrono::steady_clock::now();
    const auto slln = slln_result();
    const double slln_secs = seconds_since(t0);
    record(4, "SLLN endpoints", [&] { return slln_endpoints(slln, slln_secs); });
    record(5, "mean interval targets", [&] { return slln_targets(slln); });
    record(6, "exact weak LLN", weak_lln);
    record(7, "Marcinkiewicz", marcinkiewicz);
    record(8, "three-series", three_series);
    record(9, "Choquet/series equivalence", choquet_series);
    record(10, "cluster set", cluster_set);
    record(11, "reproducibility", reproducibility);

    int passed = 0, unexpected = 0;
    for (const auto& [id, o] : results) {
        passed += o.pass;
        if (!o.pass && !kKnownUnattainable.count(id)) ++unexpected;
    }
    std::cout << passed << "/" << results.size() << " criteria pass; " << unexpected << " unexpected failure(s)\n";
    return unexpected == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
