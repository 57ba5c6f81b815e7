#pragma once

// Flat sectioned key-value run configuration with dotted-key overrides.
// Sections: [model], [scheme], [grid], [mc], [output], [functional],
// [perturbation]. Unknown keys are validation errors naming the key.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/models.hpp"
#include "spde/schemes.hpp"

namespace spde::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // [model]
    std::string model_kind = "anderson";  // anderson | chc | diagonal-additive
    int modes = 64;
    double nu = 0.1;
    double kappa = 0.5;
    double c = 0.0;      // diagonal-additive; 0 means "pi^2 default"
    double rho = 2.0;
    double delta = 0.0;
    std::string xi = "e1";  // e<k> | zero

    // [scheme]
    std::string scheme_kind = "exponential-euler";

    // [grid]
    double T = 1.0;
    std::vector<std::int64_t> N_list = {8, 16, 32, 64, 128};
    std::int64_t N_ref = 8192;

    // [mc]
    std::int64_t samples = 10000;
    std::uint64_t seed = 42;

    // [output]
    std::string out_path;
    std::string format = "csv";  // csv | json

    // [functional]
    std::string functional = "exp_neg_sq_norm";

    // [perturbation]
    double perturbation_eps = 0.1;

    ModelSpec build_model() const;
    SchemeKind build_scheme() const;
    // Fully resolved flat key=value map, embedded into every report.
    std::map<std::string, std::string> echo() const;
};

// Parses the sectioned key-value file format. Throws ConfigError on syntax
// errors or unknown keys.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Applies "section.key=value" overrides in order.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

// Cross-field validation (power-of-two N dividing N_ref, registry names, ...).
void validate(const RunConfig& cfg);

}  // namespace spde::cli
