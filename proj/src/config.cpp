// SPDX-License-Identifier: Apache-2.0
#include "subexp/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "subexp/errors.hpp"
#include "subexp/expectation.hpp"

namespace subexp {

using nlohmann::json;

namespace {

enum class Kind { Count, Number, OptionalNumber, Numbers, Counts, Flag, Choice };

struct Param {
    std::string name;
    Kind kind;
    json fallback;
    std::vector<std::string> choices{};
};

const std::map<std::string, std::vector<Param>>& schema() {
    static const std::map<std::string, std::vector<Param>> table{
        {"slln",
         {{"N", Kind::Count, 1000000},
          {"targets", Kind::Numbers, json::array()},
          {"tolerance", Kind::Number, 0.01},
          {"oscillation_tolerance", Kind::Number, 0.05},
          {"burn_in_fraction", Kind::Number, 0.01}}},
        {"divergence", {{"N_grid", Kind::Counts, json::array({1000, 10000, 100000})}}},
        {"marcinkiewicz",
         {{"N", Kind::Count, 1000000},
          {"p", Kind::Number, 1.5},
          {"band", Kind::Number, 0.5},
          {"burn_in_fraction", Kind::Number, 0.01}}},
        {"weak_lln",
         {{"mode", Kind::Choice, "exact", {"exact", "monte_carlo"}},
          {"n_grid", Kind::Counts, json::array({32, 64, 128, 256})},
          {"epsilon", Kind::Number, 0.1},
          {"interior_target", Kind::OptionalNumber, nullptr},
          {"capacity_threshold", Kind::Number, 0.05},
          {"interior_threshold", Kind::Number, 0.9},
          {"bank_tolerance", Kind::Number, 0.05},
          {"replications", Kind::Count, 2000}}},
        {"three_series",
         {{"exponent", Kind::Number, 2.0},
          {"c", Kind::Number, 1.0},
          {"N", Kind::Count, 100000},
          {"N0", Kind::Count, 1000},
          {"tolerance", Kind::Number, 0.01}}},
        {"cluster_set",
         {{"N", Kind::Count, 1000000},
          {"m", Kind::Count, 5},
          {"delta", Kind::Number, 0.005},
          {"tol_outer", Kind::Number, 0.05},
          {"tol_hausdorff", Kind::Number, 0.15},
          {"block_ratio", Kind::Number, 5.0},
          {"check_stride", Kind::Count, 100}}},
        {"inequality_grid",
         {{"n_grid", Kind::Counts, json::array({4, 8, 16})},
          {"x_grid", Kind::Numbers, json::array({0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0})},
          {"alphas", Kind::Numbers, json::array({0.3, 0.5})},
          {"exponential", Kind::Flag, true}}},
        {"choquet_series", {{"p", Kind::Number, 1.0}, {"M", Kind::Number, 1.0}, {"K", Kind::Count, 100000}}},
        {"axioms", {{"trials", Kind::Count, 1000}, {"tolerance", Kind::Number, 1e-12}}},
    };
    return table;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

void reject_unknown(const json& object, const std::string& path, const std::set<std::string>& allowed) {
    if (!object.is_object()) schema_error(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, value] : object.items()) {
        if (!allowed.contains(key)) schema_error(path.empty() ? key : path + "." + key, "unknown field");
    }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValueError(path + ": value must be finite");
    return x;
}

std::uint64_t as_count(const json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a non-negative integer");
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const auto i = v.get<std::int64_t>();
        if (i < 0) throw ValueError(path + ": value " + std::to_string(i) + " must be non-negative");
        return static_cast<std::uint64_t>(i);
    }
    const double x = v.get<double>();
    if (!(x >= 0.0) || std::floor(x) != x || x > 1.8e19) {
        std::ostringstream os;
        os.precision(17);
        os << path << ": value " << x << " is not a non-negative integer";
        throw ValueError(os.str());
    }
    return static_cast<std::uint64_t>(x);
}

json parse_point(const json& v, const std::string& path) {
    if (v.is_number()) return json::array({as_number(v, path)});
    if (!v.is_array() || v.empty()) schema_error(path, "expected a number or a non-empty array of numbers");
    json out = json::array();
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

struct ParsedModel {
    AmbiguitySet set;
    std::optional<double> quantum;
    json resolved;
};

ParsedModel parse_model(const json& m, const std::string& path) {
    reject_unknown(m, path, {"label", "members", "quantum"});
    std::string label = "model";
    if (m.contains("label")) {
        if (!m["label"].is_string()) schema_error(join(path, "label"), "expected a string");
        label = m["label"].get<std::string>();
    }
    if (!m.contains("members")) schema_error(join(path, "members"), "required field missing");
    const json& members = m["members"];
    const std::string mpath = join(path, "members");
    if (!members.is_array()) schema_error(mpath, "expected an array");
    if (members.empty()) throw ValueError(mpath + ": at least one member is required");

    std::vector<Distribution> dists;
    json resolved_members = json::array();
    for (std::size_t i = 0; i < members.size(); ++i) {
        const std::string p = mpath + "[" + std::to_string(i) + "]";
        const json& member = members[i];
        reject_unknown(member, p, {"name", "atoms", "pareto"});
        json out;
        std::string name = "P" + std::to_string(i + 1);
        if (member.contains("name")) {
            if (!member["name"].is_string()) schema_error(join(p, "name"), "expected a string");
            name = member["name"].get<std::string>();
        }
        out["name"] = name;
        const bool has_atoms = member.contains("atoms"), has_pareto = member.contains("pareto");
        if (has_atoms == has_pareto) schema_error(p, "exactly one of \"atoms\" or \"pareto\" is required");
        try {
            if (has_atoms) {
                const json& atoms = member["atoms"];
                const std::string apath = join(p, "atoms");
                if (!atoms.is_array()) schema_error(apath, "expected an array");
                std::vector<Atom> list;
                json resolved_atoms = json::array();
                for (std::size_t a = 0; a < atoms.size(); ++a) {
                    const std::string ap = apath + "[" + std::to_string(a) + "]";
                    reject_unknown(atoms[a], ap, {"value", "weight"});
                    if (!atoms[a].contains("value")) schema_error(join(ap, "value"), "required field missing");
                    if (!atoms[a].contains("weight")) schema_error(join(ap, "weight"), "required field missing");
                    const json value = parse_point(atoms[a]["value"], join(ap, "value"));
                    const double weight = as_number(atoms[a]["weight"], join(ap, "weight"));
                    list.push_back({value.get<Point>(), weight});
                    resolved_atoms.push_back({{"value", value}, {"weight", weight}});
                }
                dists.push_back(Distribution::finite(std::move(list)));
                out["atoms"] = resolved_atoms;
            } else {
                const json& par = member["pareto"];
                const std::string pp = join(p, "pareto");
                reject_unknown(par, pp, {"alpha", "scale", "right_mass"});
                if (!par.contains("alpha")) schema_error(join(pp, "alpha"), "required field missing");
                const double alpha = as_number(par["alpha"], join(pp, "alpha"));
                const double scale = par.contains("scale") ? as_number(par["scale"], join(pp, "scale")) : 1.0;
                const double right = par.contains("right_mass") ? as_number(par["right_mass"], join(pp, "right_mass")) : 0.5;
                dists.push_back(Distribution::pareto(alpha, scale, right));
                out["pareto"] = {{"alpha", alpha}, {"scale", scale}, {"right_mass", right}};
            }
        } catch (const SchemaError&) {
            throw;
        } catch (const ValueError& e) {
            throw ValueError(p + ": " + e.what());
        }
        resolved_members.push_back(out);
    }

    std::optional<double> quantum;
    if (m.contains("quantum") && !m["quantum"].is_null()) {
        quantum = as_number(m["quantum"], join(path, "quantum"));
        if (!(*quantum > 0.0)) throw ValueError(join(path, "quantum") + ": must be > 0");
    }
    AmbiguitySet set = [&] {
        try {
            return AmbiguitySet(std::move(dists), label);
        } catch (const ValueError& e) {
            throw ValueError(mpath + ": " + e.what());
        }
    }();
    json resolved{{"label", label}, {"members", resolved_members}, {"quantum", quantum ? json(*quantum) : json(nullptr)}};
    return {std::move(set), quantum, std::move(resolved)};
}

json parse_parameter(const Param& spec, const json& v, const std::string& path) {
    switch (spec.kind) {
        case Kind::Count: return as_count(v, path);
        case Kind::Number: return as_number(v, path);
        case Kind::OptionalNumber: return v.is_null() ? json(nullptr) : json(as_number(v, path));
        case Kind::Flag:
            if (!v.is_boolean()) schema_error(path, "expected true or false");
            return v;
        case Kind::Choice: {
            if (!v.is_string()) schema_error(path, "expected a string");
            const auto s = v.get<std::string>();
            for (const auto& c : spec.choices)
                if (c == s) return v;
            throw ValueError(path + ": unsupported value \"" + s + "\"");
        }
        case Kind::Numbers:
        case Kind::Counts: {
            if (!v.is_array()) schema_error(path, "expected an array");
            json out = json::array();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::string p = path + "[" + std::to_string(i) + "]";
                out.push_back(spec.kind == Kind::Counts ? json(as_count(v[i], p)) : json(as_number(v[i], p)));
            }
            return out;
        }
    }
    return v;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& [k, v] : schema()) out.push_back(k);
        return out;
    }();
    return ids;
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("<root>: malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig parse_config(const json& doc) {
    reject_unknown(doc, "", {"experiment", "model", "parameters", "seeds", "output_dir", "threads"});
    RunConfig cfg;

    if (!doc.contains("experiment")) schema_error("experiment", "required field missing");
    if (!doc["experiment"].is_string()) schema_error("experiment", "expected a string");
    cfg.experiment = doc["experiment"].get<std::string>();
    const auto it = schema().find(cfg.experiment);
    if (it == schema().end()) throw ValueError("experiment: unknown experiment id \"" + cfg.experiment + "\"");

    json resolved_model = nullptr;
    if (doc.contains("model") && !doc["model"].is_null()) {
        auto parsed = parse_model(doc["model"], "model");
        cfg.model = std::move(parsed.set);
        cfg.quantum = parsed.quantum;
        resolved_model = std::move(parsed.resolved);
    } else if (cfg.experiment != "axioms") {
        schema_error("model", "required field missing");
    }

    const json empty = json::object();
    const json& given = doc.contains("parameters") ? doc["parameters"] : empty;
    std::set<std::string> allowed;
    for (const auto& p : it->second) allowed.insert(p.name);
    reject_unknown(given, "parameters", allowed);
    cfg.parameters = json::object();
    for (const auto& p : it->second) {
        const std::string path = "parameters." + p.name;
        cfg.parameters[p.name] = given.contains(p.name) ? parse_parameter(p, given[p.name], path) : p.fallback;
    }
    if (cfg.experiment == "weak_lln" && cfg.parameters["interior_target"].is_null() && cfg.model &&
        cfg.model->dimension() == 1) {
        try {
            const auto means = member_means(*cfg.model);
            double lo = kInf, hi = -kInf;
            for (const auto& m : means) {
                lo = std::min(lo, m[0]);
                hi = std::max(hi, m[0]);
            }
            cfg.parameters["interior_target"] = 0.5 * (lo + hi);
        } catch (const NotConvergent&) {
        }
    }

    cfg.seeds = {1, 2, 3};
    if (doc.contains("seeds")) {
        const json& s = doc["seeds"];
        if (!s.is_array()) schema_error("seeds", "expected an array of non-negative integers");
        if (s.empty()) throw ValueError("seeds: at least one seed is required");
        cfg.seeds.clear();
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string path = "seeds[" + std::to_string(i) + "]";
            if (!s[i].is_number_integer() && !s[i].is_number_unsigned()) schema_error(path, "expected an integer");
            cfg.seeds.push_back(as_count(s[i], path));
        }
    }

    cfg.output_dir = "results";
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string()) schema_error("output_dir", "expected a string");
        cfg.output_dir = doc["output_dir"].get<std::string>();
    }
    if (doc.contains("threads")) {
        const auto t = as_count(doc["threads"], "threads");
        if (t < 1 || t > 1024) throw ValueError("threads: value " + std::to_string(t) + " must lie in [1, 1024]");
        cfg.threads = static_cast<unsigned>(t);
    }

    cfg.resolved = json::object();
    cfg.resolved["experiment"] = cfg.experiment;
    cfg.resolved["model"] = resolved_model;
    cfg.resolved["parameters"] = cfg.parameters;
    cfg.resolved["seeds"] = cfg.seeds;
    cfg.resolved["output_dir"] = cfg.output_dir;
    cfg.resolved["threads"] = cfg.threads;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValueError("cannot open config file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

void RunConfig::override_seed(std::uint64_t seed) {
    seeds = {seed};
    resolved["seeds"] = seeds;
}

void RunConfig::set_output_dir(std::string dir) {
    output_dir = std::move(dir);
    resolved["output_dir"] = output_dir;
}

void RunConfig::set_threads(unsigned t) {
    if (t < 1) throw ValueError("threads must be >= 1");
    threads = t;
    resolved["threads"] = threads;
}

json model_to_json(const AmbiguitySet& set, std::optional<double> quantum) {
    json members = json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& m = set.member(i);
        json out{{"name", "P" + std::to_string(i + 1)}};
        if (m.is_pareto()) {
            const auto& p = m.as_pareto();
            out["pareto"] = {{"alpha", p.alpha}, {"scale", p.scale}, {"right_mass", p.right_mass}};
        } else {
            json atoms = json::array();
            for (const auto& a : m.as_finite().atoms) atoms.push_back({{"value", a.value}, {"weight", a.weight}});
            out["atoms"] = atoms;
        }
        members.push_back(out);
    }
    return {{"label", set.label()}, {"members", members}, {"quantum", quantum ? json(*quantum) : json(nullptr)}};
}

}  // namespace subexp
