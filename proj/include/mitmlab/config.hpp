#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mitmlab/harness.hpp"

namespace mitmlab {

/// Bad configuration input. The message names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Every key accepted in a config document.
const std::vector<std::string>& config_keys();

/// Applies the keys of a flat JSON object on top of `base`.
void apply_config_json(ExperimentConfig& config, const nlohmann::json& doc);

/// Applies one `KEY=VALUE` override. VALUE is read as JSON, falling back to
/// a plain string.
void apply_override(ExperimentConfig& config, const std::string& assignment);

/// Resolves a config: preset (from `preset_name`, the file or an override)
/// first, then file keys, then overrides in order. With `check` set, field
/// invariants are enforced.
ExperimentConfig parse_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides,
                              const std::optional<std::string>& preset_name = std::nullopt, bool check = true);

/// Throws ConfigError for the first field whose value is out of domain.
void check_config(const ExperimentConfig& config);

/// Fully resolved config as a flat JSON object (matrices as nested arrays).
/// `workers` is left out.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// 16 hex digits of FNV-1a over the canonical config dump.
std::string config_hash(const ExperimentConfig& config);

struct ValidationIssue {
    std::string key;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const noexcept { return issues.empty(); }
};

/// Static checks run before any simulation.
ValidationReport validate(const ExperimentConfig& config);

}  // namespace mitmlab
