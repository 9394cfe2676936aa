#include "mitmlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mitmlab/random.hpp"

namespace mitmlab {
namespace {

using nlohmann::json;

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

double number_of(const std::string& key, const json& v) {
    if (!v.is_number()) throw ConfigError(key, "expected a number, got " + std::string(v.type_name()));
    return v.get<double>();
}

/// A number is a 1×1 matrix; otherwise a non-empty array of equal-length rows.
Mat matrix_of(const std::string& key, const json& v) {
    if (v.is_number()) return Mat::Constant(1, 1, v.get<double>());
    if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a number or nested array");
    const auto rows = static_cast<Eigen::Index>(v.size());
    if (rows > kMaxDim) throw ConfigError(key, "dimension exceeds " + std::to_string(kMaxDim));
    Eigen::Index cols = -1;
    Mat m;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array()) throw ConfigError(key, "expected a nested array of rows");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            if (cols == 0 || cols > kMaxDim) throw ConfigError(key, "bad row length");
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError(key, "rows differ in length");
        }
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = number_of(key, row[static_cast<std::size_t>(j)]);
    }
    return m;
}

Vec vector_of(const std::string& key, const json& v) {
    if (v.is_number()) return Vec::Constant(1, v.get<double>());
    if (!v.is_array() || v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) {
        throw ConfigError(key, "expected a number or flat array");
    }
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = number_of(key, v[i]);
    return out;
}

std::vector<double> doubles_of(const std::string& key, const json& v) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(key, "expected a number or array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number_of(key, e));
    return out;
}

std::int64_t integer_of(const std::string& key, const json& v) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    throw ConfigError(key, "expected an integer, got " + v.dump());
}

int int_of(const std::string& key, const json& v) {
    const std::int64_t i = integer_of(key, v);
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
        throw ConfigError(key, "integer out of range");
    }
    return static_cast<int>(i);
}

std::vector<int> ints_of(const std::string& key, const json& v) {
    if (!v.is_array()) return {int_of(key, v)};
    std::vector<int> out;
    for (const auto& e : v) out.push_back(int_of(key, e));
    return out;
}

std::string string_of(const std::string& key, const json& v) {
    if (!v.is_string()) throw ConfigError(key, "expected a string, got " + std::string(v.type_name()));
    return v.get<std::string>();
}

template <class T, class F>
std::optional<T> optional_of(const json& v, F&& f) {
    if (v.is_null()) return std::nullopt;
    return f(v);
}

struct Field {
    std::function<json(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&, const json&)> set;
};

template <class T>
json opt_json(const std::optional<T>& v, json (*conv)(const T&)) {
    return v ? conv(*v) : json(nullptr);
}

json vec_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json double_json(const double& d) { return d; }

const std::map<std::string, Field>& fields() {
    using C = ExperimentConfig;
    using S = const std::string&;
    static const std::map<std::string, Field> table{
        {"experiment", {[](const C& c) { return json(c.experiment); },
                        [](C& c, S k, const json& v) { c.experiment = string_of(k, v); }}},
        {"preset", {[](const C& c) { return json(c.preset); }, [](C& c, S k, const json& v) {
                        c.preset = string_of(k, v);
                    }}},
        {"preset_version", {[](const C& c) { return json(c.preset_version); },
                            [](C& c, S k, const json& v) { c.preset_version = int_of(k, v); }}},
        {"A", {[](const C& c) { return matrix_to_json(c.a); }, [](C& c, S k, const json& v) { c.a = matrix_of(k, v); }}},
        {"sigma2", {[](const C& c) { return json(c.sigma2); }, [](C& c, S k, const json& v) {
                        c.sigma2 = number_of(k, v);
                    }}},
        {"x0", {[](const C& c) { return opt_json<Vec>(c.x0, vec_json); },
                [](C& c, S k, const json& v) {
                    c.x0 = optional_of<Vec>(v, [&](const json& e) { return vector_of(k, e); });
                }}},
        {"overflow_guard", {[](const C& c) { return json(c.overflow_guard); },
                            [](C& c, S k, const json& v) { c.overflow_guard = number_of(k, v); }}},
        {"policy", {[](const C& c) { return json(c.policy); }, [](C& c, S k, const json& v) {
                        c.policy = string_of(k, v);
                    }}},
        {"policy_gain", {[](const C& c) { return opt_json<Mat>(c.policy_gain, matrix_to_json); },
                         [](C& c, S k, const json& v) {
                             c.policy_gain = optional_of<Mat>(v, [&](const json& e) { return matrix_of(k, e); });
                         }}},
        {"policy_scale", {[](const C& c) { return json(c.policy_scale); },
                          [](C& c, S k, const json& v) { c.policy_scale = number_of(k, v); }}},
        {"dither_grid", {[](const C& c) { return json(c.dither_grid); },
                         [](C& c, S k, const json& v) { c.dither_grid = doubles_of(k, v); }}},
        {"L_grid", {[](const C& c) { return json(c.L_grid); }, [](C& c, S k, const json& v) {
                        c.L_grid = ints_of(k, v);
                    }}},
        {"learning_mode", {[](const C& c) { return json(c.learning_mode); },
                           [](C& c, S k, const json& v) { c.learning_mode = string_of(k, v); }}},
        {"malicious_input", {[](const C& c) { return json(c.malicious_input); },
                             [](C& c, S k, const json& v) { c.malicious_input = string_of(k, v); }}},
        {"pinned_estimate", {[](const C& c) { return opt_json<Mat>(c.pinned_estimate, matrix_to_json); },
                             [](C& c, S k, const json& v) {
                                 c.pinned_estimate =
                                     optional_of<Mat>(v, [&](const json& e) { return matrix_of(k, e); });
                             }}},
        {"detector", {[](const C& c) { return json(c.detector); },
                      [](C& c, S k, const json& v) { c.detector = string_of(k, v); }}},
        {"gamma", {[](const C& c) { return json(c.gamma); }, [](C& c, S k, const json& v) {
                       c.gamma = number_of(k, v);
                   }}},
        {"gamma_grid", {[](const C& c) { return json(c.gamma_grid); },
                        [](C& c, S k, const json& v) { c.gamma_grid = doubles_of(k, v); }}},
        {"tau_grid", {[](const C& c) { return json(c.tau_grid); },
                      [](C& c, S k, const json& v) { c.tau_grid = ints_of(k, v); }}},
        {"Sigma", {[](const C& c) { return opt_json<Mat>(c.Sigma, matrix_to_json); },
                   [](C& c, S k, const json& v) {
                       c.Sigma = optional_of<Mat>(v, [&](const json& e) { return matrix_of(k, e); });
                   }}},
        {"epsilon_grid", {[](const C& c) { return json(c.epsilon_grid); },
                          [](C& c, S k, const json& v) { c.epsilon_grid = doubles_of(k, v); }}},
        {"trials", {[](const C& c) { return json(c.trials); }, [](C& c, S k, const json& v) {
                        c.trials = integer_of(k, v);
                    }}},
        {"sprt_trials", {[](const C& c) { return json(c.sprt_trials); },
                         [](C& c, S k, const json& v) { c.sprt_trials = integer_of(k, v); }}},
        {"curve_trials", {[](const C& c) { return json(c.curve_trials); },
                          [](C& c, S k, const json& v) { c.curve_trials = integer_of(k, v); }}},
        {"horizon", {[](const C& c) { return json(c.horizon); }, [](C& c, S k, const json& v) {
                         c.horizon = int_of(k, v);
                     }}},
        {"max_horizon", {[](const C& c) { return json(c.max_horizon); },
                         [](C& c, S k, const json& v) { c.max_horizon = int_of(k, v); }}},
        {"master_seed", {[](const C& c) { return json(c.master_seed); },
                         [](C& c, S k, const json& v) {
                             if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
                                 throw ConfigError(k, "expected an unsigned 64-bit integer");
                             }
                             c.master_seed = v.get<std::uint64_t>();
                         }}},
        {"workers", {[](const C& c) { return json(c.workers); }, [](C& c, S k, const json& v) {
                         c.workers = int_of(k, v);
                     }}},
        {"k_grid", {[](const C& c) { return json(c.k_grid); }, [](C& c, S k, const json& v) {
                        c.k_grid = ints_of(k, v);
                    }}},
        {"eta_grid", {[](const C& c) { return json(c.eta_grid); },
                      [](C& c, S k, const json& v) { c.eta_grid = doubles_of(k, v); }}},
        {"D_grid", {[](const C& c) { return json(c.D_grid); }, [](C& c, S k, const json& v) {
                        c.D_grid = doubles_of(k, v);
                    }}},
        {"delta", {[](const C& c) { return json(c.delta); }, [](C& c, S k, const json& v) {
                       c.delta = number_of(k, v);
                   }}},
        {"tail_c", {[](const C& c) { return opt_json<double>(c.tail_c, double_json); },
                    [](C& c, S k, const json& v) {
                        c.tail_c = optional_of<double>(v, [&](const json& e) { return number_of(k, e); });
                    }}},
        {"tail_alpha", {[](const C& c) { return opt_json<double>(c.tail_alpha, double_json); },
                        [](C& c, S k, const json& v) {
                            c.tail_alpha = optional_of<double>(v, [&](const json& e) { return number_of(k, e); });
                        }}},
        {"kl_offset", {[](const C& c) { return json(c.kl_offset); },
                       [](C& c, S k, const json& v) { c.kl_offset = int_of(k, v); }}},
    };
    return table;
}

void set_field(ExperimentConfig& config, const std::string& key, const json& value) {
    const auto& table = fields();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    it->second.set(config, key, value);
}

json parse_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return json(text);
    }
}

std::pair<std::string, json> split_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like KEY=VALUE");
    return {assignment.substr(0, eq), parse_value(assignment.substr(eq + 1))};
}

json read_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", "'" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config", "'" + path + "' must hold a JSON object");
    return doc;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

void require_shape(const std::optional<Mat>& m, int dim, const std::string& key) {
    if (m) require(m->rows() == dim && m->cols() == dim, key, "must be " + std::to_string(dim) + "x" + std::to_string(dim));
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, field] : fields()) k.push_back(name);
        return k;
    }();
    return keys;
}

void apply_config_json(ExperimentConfig& config, const json& doc) {
    if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
    for (const auto& [key, value] : doc.items()) set_field(config, key, value);
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
    const auto [key, value] = split_override(assignment);
    set_field(config, key, value);
}

ExperimentConfig parse_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides,
                              const std::optional<std::string>& preset_name, bool check) {
    json doc = path ? read_document(*path) : json::object();

    std::optional<std::string> name = preset_name;
    if (doc.contains("preset")) name = string_of("preset", doc["preset"]);
    for (const auto& o : overrides) {
        const auto [key, value] = split_override(o);
        if (key == "preset") name = string_of("preset", value);
    }

    ExperimentConfig config;
    if (name && !name->empty()) {
        try {
            config = preset(*name);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("preset", e.what());
        }
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "preset") continue;
        if (key == "preset_version") {
            require(config.preset.empty() || int_of(key, value) == config.preset_version, key,
                    "does not match the compiled preset version " + std::to_string(config.preset_version));
            continue;
        }
        set_field(config, key, value);
    }
    for (const auto& o : overrides) {
        const auto [key, value] = split_override(o);
        if (key == "preset" || key == "preset_version") continue;
        set_field(config, key, value);
    }
    if (check) check_config(config);
    return config;
}

void check_config(const ExperimentConfig& c) {
    const int dim = c.dim();
    require(c.a.rows() == c.a.cols() && dim >= 1, "A", "must be square");
    require(c.a.allFinite(), "A", "must be finite");
    require(std::isfinite(c.sigma2) && c.sigma2 >= 0.0, "sigma2", "must be >= 0");
    if (c.x0) require(c.x0->size() == dim, "x0", "length must match A");
    require(c.overflow_guard > 0.0, "overflow_guard", "must be > 0");
    require(c.policy == "cancel_dither" || c.policy == "scaled_cancel" || c.policy == "linear_gain", "policy",
            "must be cancel_dither, scaled_cancel or linear_gain");
    require_shape(c.policy_gain, dim, "policy_gain");
    require(c.policy != "linear_gain" || c.policy_gain.has_value(), "policy_gain", "required for linear_gain");
    require(std::isfinite(c.policy_scale), "policy_scale", "must be finite");
    require(!c.dither_grid.empty(), "dither_grid", "must not be empty");
    for (double d : c.dither_grid) require(std::isfinite(d) && d >= 0.0, "dither_grid", "entries must be >= 0");
    require(!c.L_grid.empty(), "L_grid", "must not be empty");
    for (int L : c.L_grid) require(L >= 1, "L_grid", "entries must be >= 1");
    require(c.learning_mode == "exploration_only" || c.learning_mode == "continual", "learning_mode",
            "must be exploration_only or continual");
    require(c.malicious_input == "destabilizing_push" || c.malicious_input == "zero", "malicious_input",
            "must be destabilizing_push or zero");
    require_shape(c.pinned_estimate, dim, "pinned_estimate");
    require(!c.pinned_estimate || c.learning_mode == "exploration_only", "pinned_estimate",
            "requires learning_mode exploration_only");
    require(c.detector == "variance" || c.detector == "covariance" || c.detector == "sprt", "detector",
            "must be variance, covariance or sprt");
    require(std::isfinite(c.gamma) && c.gamma > 0.0, "gamma", "must be > 0");
    for (double g : c.gamma_grid) require(std::isfinite(g) && g > 0.0, "gamma_grid", "entries must be > 0");
    require(!c.tau_grid.empty(), "tau_grid", "must not be empty");
    for (int t : c.tau_grid) require(t >= 1, "tau_grid", "entries must be >= 1");
    require_shape(c.Sigma, dim, "Sigma");
    require(!c.epsilon_grid.empty(), "epsilon_grid", "must not be empty");
    for (double e : c.epsilon_grid) require(e > 0.0 && e < 1.0, "epsilon_grid", "entries must lie in (0, 1)");
    require(c.trials >= 1, "trials", "must be >= 1");
    require(c.sprt_trials >= 1, "sprt_trials", "must be >= 1");
    require(c.curve_trials >= 1, "curve_trials", "must be >= 1");
    require(c.horizon >= 0, "horizon", "must be >= 0");
    require(c.max_horizon >= 1, "max_horizon", "must be >= 1");
    require(c.workers >= 1, "workers", "must be >= 1");
    for (int k : c.k_grid) require(k >= 2, "k_grid", "entries must be >= 2");
    for (double e : c.eta_grid) require(e > 0.0, "eta_grid", "entries must be > 0");
    for (double d : c.D_grid) require(d > 0.0, "D_grid", "entries must be > 0");
    require(c.delta > 0.0 && c.delta < 1.0, "delta", "must lie in (0, 1)");
    if (c.tail_c) require(*c.tail_c > 0.0, "tail_c", "must be > 0");
    if (c.tail_alpha) require(*c.tail_alpha >= 1.0, "tail_alpha", "must be >= 1");
    require(c.kl_offset >= 1, "kl_offset", "must be >= 1");
}

json config_to_json(const ExperimentConfig& config) {
    json doc = json::object();
    for (const auto& [name, field] : fields()) {
        if (name != "workers") doc[name] = field.get(config);  // results do not depend on it
    }
    return doc;
}

ExperimentConfig config_from_json(const json& doc) {
    ExperimentConfig config;
    apply_config_json(config, doc);
    return config;
}

std::string config_hash(const ExperimentConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_to_json(config).dump())));
    return buf;
}

ValidationReport validate(const ExperimentConfig& c) {
    ValidationReport report;
    auto fail = [&](const std::string& key, const std::string& message) {
        for (const auto& i : report.issues) {
            if (i.key == key) return;
        }
        report.issues.push_back({key, message});
    };

    for (double e : c.epsilon_grid) {
        if (!(e > 0.0 && e < 1.0)) {
            fail("epsilon_grid", "SPRT error level must lie in the open interval (0, 1), got " + nlohmann::json(e).dump());
        }
    }
    if (!(c.gamma > 0.0)) fail("gamma", "detection threshold gamma must be > 0");
    const int L_max = c.L_grid.empty() ? 0 : *std::max_element(c.L_grid.begin(), c.L_grid.end());
    if (c.horizon > 0 && c.horizon <= L_max) {
        fail("horizon", "horizon must exceed the exploration length L = " + std::to_string(L_max));
    }
    if (c.max_horizon <= L_max) {
        fail("max_horizon", "max_horizon must exceed the exploration length L = " + std::to_string(L_max));
    }
    if (c.experiment == "exploration_recipe" && c.policy == "linear_gain" && c.policy_gain &&
        c.policy_gain->rows() == c.a.rows() && c.policy_gain->cols() == c.a.cols()) {
        const double rho = spectral_radius(c.a - *c.policy_gain);
        if (!is_marginally_stable(c.a - *c.policy_gain)) {
            std::ostringstream os;
            os << "closed loop A - K must be marginally stable (spectral radius <= 1) for the LS tail bound; "
                  "spectral radius is "
               << rho;
            fail("policy_gain", os.str());
        }
    }
    if (c.experiment == "exploration_recipe" && c.policy != "linear_gain") {
        fail("policy", "exploration_recipe needs a linear_gain policy with a marginally stable A - K");
    }
    static const std::vector<std::string> experiments{"success_vs_L", "success_vs_window", "bound_suite",
                                                      "kl_identity",  "ls_tail",           "chebyshev",
                                                      "exploration_recipe", "energy_tradeoff"};
    if (std::find(experiments.begin(), experiments.end(), c.experiment) == experiments.end()) {
        fail("experiment", "unknown experiment '" + c.experiment + "'");
    }
    try {
        check_config(c);
    } catch (const ConfigError& e) {
        fail(e.key(), e.what());
    }
    return report;
}

}  // namespace mitmlab
