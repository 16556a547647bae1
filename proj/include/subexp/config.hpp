// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subexp/distribution.hpp"

namespace subexp {

/// Experiment ids accepted in the "experiment" field.
const std::vector<std::string>& experiment_ids();

/// A validated run description. `resolved` is the complete document with
/// every default written out; `parameters` is its "parameters" member.
struct RunConfig {
    std::string experiment;
    std::optional<AmbiguitySet> model;
    std::optional<double> quantum;
    std::vector<std::uint64_t> seeds;
    std::string output_dir;
    unsigned threads = 1;
    nlohmann::json parameters;
    nlohmann::json resolved;

    double number(const std::string& key) const { return parameters.at(key).get<double>(); }
    std::size_t count(const std::string& key) const { return parameters.at(key).get<std::size_t>(); }
    std::vector<double> numbers(const std::string& key) const { return parameters.at(key).get<std::vector<double>>(); }
    std::vector<std::size_t> counts(const std::string& key) const {
        return parameters.at(key).get<std::vector<std::size_t>>();
    }

    /// Replaces the seed list with {seed} in both views.
    void override_seed(std::uint64_t seed);
    void set_output_dir(std::string dir);
    void set_threads(unsigned threads);
};

/// Strict parse: unknown or mistyped fields raise SchemaError naming the
/// field path (for example "model.members[1].atomz"); out-of-range values
/// raise ValueError.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::string& path);

/// JSON description of a model in the config schema.
nlohmann::json model_to_json(const AmbiguitySet& set, std::optional<double> quantum = std::nullopt);

}  // namespace subexp
