#include "mitmlab/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mitmlab {
namespace {

using nlohmann::json;

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_of(const json& doc, const char* key) {
    if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
    return doc[key].get<T>();
}

template <class T>
std::string cell_text(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_integral_v<T>) {
        return std::to_string(*v);
    } else {
        return format_number(*v);
    }
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument(what + ": bad number '" + s + "'");
    return v;
}

void write_rows(std::ostream& out, int dim, int steps, const std::vector<int>* theta, const Series& x,
                const Series& v, const Series& y, const Series& u, const MatrixSeries* a_hat) {
    out << "step,theta";
    for (const char* p : {"x", "v", "y", "u"}) {
        for (int i = 0; i < dim; ++i) out << ',' << p << '_' << i;
    }
    if (a_hat) {
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) out << ",a_hat_" << i << j;
        }
    }
    out << '\n';
    for (int k = 0; k < steps; ++k) {
        const auto sk = static_cast<std::size_t>(k);
        out << k << ',' << (theta ? (*theta)[sk] : 0);
        for (const Series* s : {&x, &v, &y}) {
            for (int i = 0; i < dim; ++i) out << ',' << format_number(s->operator[](sk)(i));
        }
        for (int i = 0; i < dim; ++i) {
            out << ',';
            if (sk < u.size()) out << format_number(u[sk](i));
        }
        if (a_hat) {
            const auto m = (*a_hat)[sk];
            for (int i = 0; i < dim; ++i) {
                for (int j = 0; j < dim; ++j) out << ',' << format_number(m(i, j));
            }
        }
        out << '\n';
    }
}

}  // namespace

const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> columns{
        "experiment", "cell",        "kind",       "L",          "dither_var",    "tau",
        "epsilon",    "rate",        "ci_lo",      "ci_hi",      "T_hat",         "C_hat_at_n0",
        "n0",         "thm1_lower",  "thm2_upper", "censored_frac", "diverged",   "trials"};
    return columns;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json quantize(const json& doc) {
    if (doc.is_number_float()) {
        const double v = doc.get<double>();
        return std::isfinite(v) ? json(round12(v)) : json(nullptr);
    }
    if (doc.is_array()) {
        json out = json::array();
        for (const auto& e : doc) out.push_back(quantize(e));
        return out;
    }
    if (doc.is_object()) {
        json out = json::object();
        for (const auto& [k, v] : doc.items()) out[k] = quantize(v);
        return out;
    }
    return doc;
}

json result_to_json(const ExperimentResult& result) {
    json cells = json::array();
    for (const auto& c : result.cells) {
        cells.push_back({{"cell", c.cell},
                         {"kind", c.kind},
                         {"L", opt(c.L)},
                         {"dither_var", opt(c.dither_var)},
                         {"tau", opt(c.tau)},
                         {"epsilon", opt(c.epsilon)},
                         {"rate", opt(c.rate)},
                         {"ci_lo", opt(c.ci_lo)},
                         {"ci_hi", opt(c.ci_hi)},
                         {"T_hat", opt(c.T_hat)},
                         {"C_hat_at_n0", opt(c.C_hat_at_n0)},
                         {"n0", opt(c.n0)},
                         {"thm1_lower", opt(c.thm1_lower)},
                         {"thm2_upper", opt(c.thm2_upper)},
                         {"censored_frac", opt(c.censored_frac)},
                         {"successes", c.successes},
                         {"failures", c.failures},
                         {"censored", c.censored},
                         {"diverged", c.diverged},
                         {"trials", c.trials},
                         {"extras", c.extras}});
    }
    return quantize({{"experiment", result.experiment},
                     {"cells", cells},
                     {"warnings", result.warnings},
                     {"provenance",
                      {{"config", result.provenance.config},
                       {"config_hash", result.provenance.config_hash},
                       {"master_seed", result.provenance.master_seed},
                       {"version", result.provenance.version}}}});
}

ExperimentResult result_from_json(const json& doc) {
    ExperimentResult r;
    r.experiment = doc.at("experiment").get<std::string>();
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    const json& p = doc.at("provenance");
    r.provenance.config = p.at("config");
    r.provenance.config_hash = p.at("config_hash").get<std::string>();
    r.provenance.master_seed = p.at("master_seed").get<std::uint64_t>();
    r.provenance.version = p.at("version").get<std::string>();
    for (const json& c : doc.at("cells")) {
        CellResult cell;
        cell.cell = c.at("cell").get<std::string>();
        cell.kind = c.at("kind").get<std::string>();
        cell.L = opt_of<int>(c, "L");
        cell.dither_var = opt_of<double>(c, "dither_var");
        cell.tau = opt_of<int>(c, "tau");
        cell.epsilon = opt_of<double>(c, "epsilon");
        cell.rate = opt_of<double>(c, "rate");
        cell.ci_lo = opt_of<double>(c, "ci_lo");
        cell.ci_hi = opt_of<double>(c, "ci_hi");
        cell.T_hat = opt_of<double>(c, "T_hat");
        cell.C_hat_at_n0 = opt_of<double>(c, "C_hat_at_n0");
        cell.n0 = opt_of<int>(c, "n0");
        cell.thm1_lower = opt_of<double>(c, "thm1_lower");
        cell.thm2_upper = opt_of<double>(c, "thm2_upper");
        cell.censored_frac = opt_of<double>(c, "censored_frac");
        cell.successes = c.at("successes").get<std::int64_t>();
        cell.failures = c.at("failures").get<std::int64_t>();
        cell.censored = c.at("censored").get<std::int64_t>();
        cell.diverged = c.at("diverged").get<std::int64_t>();
        cell.trials = c.at("trials").get<std::int64_t>();
        cell.extras = c.at("extras");
        r.cells.push_back(std::move(cell));
    }
    return r;
}

void write_result_csv(const ExperimentResult& result, std::ostream& out) {
    const auto& cols = result_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& c : result.cells) {
        out << result.experiment << ',' << c.cell << ',' << c.kind << ',' << cell_text(c.L) << ','
            << cell_text(c.dither_var) << ',' << cell_text(c.tau) << ',' << cell_text(c.epsilon) << ','
            << cell_text(c.rate) << ',' << cell_text(c.ci_lo) << ',' << cell_text(c.ci_hi) << ','
            << cell_text(c.T_hat) << ',' << cell_text(c.C_hat_at_n0) << ',' << cell_text(c.n0) << ','
            << cell_text(c.thm1_lower) << ',' << cell_text(c.thm2_upper) << ',' << cell_text(c.censored_frac) << ','
            << c.diverged << ',' << c.trials << '\n';
    }
}

void write_result_json(const ExperimentResult& result, std::ostream& out) {
    out << result_to_json(result).dump(2) << '\n';
}

std::vector<std::filesystem::path> emit_results(const ExperimentResult& result, const std::string& format,
                                                const std::filesystem::path& out_dir) {
    if (format != "csv" && format != "json") throw std::invalid_argument("format must be csv or json");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto write = [&](const std::filesystem::path& path, auto&& body) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        body(out);
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + path.string());
        written.push_back(path);
    };
    const std::string stem = result.experiment.empty() ? "result" : result.experiment;
    if (format == "csv") write(out_dir / (stem + ".csv"), [&](std::ostream& o) { write_result_csv(result, o); });
    write(out_dir / (stem + ".json"), [&](std::ostream& o) { write_result_json(result, o); });

    int index = 0;
    for (const auto& c : result.cells) {
        if (c.kind != "curve" || !c.extras.contains("curve")) continue;
        const json& j = c.extras["curve"];
        const DeceptionCostCurve curve{j.at("n").front().get<int>() - 1,
                                       j.at("C_hat").get<std::vector<double>>(),
                                       j.at("C_hat_se").get<std::vector<double>>(),
                                       j.at("C_tilde").get<std::vector<double>>(),
                                       j.at("C_tilde_se").get<std::vector<double>>(),
                                       j.at("trials").get<std::int64_t>()};
        write(out_dir / (stem + "_curve_" + std::to_string(index++) + ".csv"),
              [&](std::ostream& o) { write_curve_csv(curve, o); });
    }
    return written;
}

void write_trajectory_csv(const AttackedTrajectory& traj, std::ostream& out) {
    write_rows(out, traj.X.dim(), static_cast<int>(traj.X.size()), &traj.theta, traj.X, traj.V, traj.Y, traj.U,
               &traj.a_hat);
}

void write_trajectory_csv(const NominalTrajectory& traj, std::ostream& out) {
    write_rows(out, traj.X.dim(), static_cast<int>(traj.X.size()), nullptr, traj.X, traj.X, traj.X, traj.U,
               nullptr);
}

TrajectoryDump read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("trajectory: empty input");
    const auto header = split(line, ',');
    int dim = 0;
    while (std::find(header.begin(), header.end(), "x_" + std::to_string(dim)) != header.end()) ++dim;
    if (dim == 0 || header.size() < 2 || header[0] != "step" || header[1] != "theta") {
        throw std::invalid_argument("trajectory: unrecognised header");
    }
    const std::size_t base = 2 + 4 * static_cast<std::size_t>(dim);
    const bool has_a_hat = header.size() == base + static_cast<std::size_t>(dim * dim);
    if (!has_a_hat && header.size() != base) throw std::invalid_argument("trajectory: unexpected column count");

    TrajectoryDump d;
    d.dim = dim;
    d.X = Series(dim), d.V = Series(dim), d.Y = Series(dim), d.U = Series(dim);
    if (has_a_hat) d.a_hat = MatrixSeries(dim);
    Vec tmp(dim);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) throw std::invalid_argument("trajectory: ragged row");
        if (parse_double(f[0], "step") != static_cast<double>(d.X.size())) {
            throw std::invalid_argument("trajectory: steps must run 0, 1, 2, ...");
        }
        d.theta.push_back(static_cast<int>(parse_double(f[1], "theta")));
        std::size_t col = 2;
        for (Series* s : {&d.X, &d.V, &d.Y}) {
            for (int i = 0; i < dim; ++i) tmp(i) = parse_double(f[col++], "trajectory");
            s->push_back(tmp);
        }
        if (!f[col].empty()) {
            for (int i = 0; i < dim; ++i) tmp(i) = parse_double(f[col++], "trajectory");
            d.U.push_back(tmp);
        } else {
            col += static_cast<std::size_t>(dim);
        }
        if (has_a_hat) {
            Mat m(dim, dim);
            for (int i = 0; i < dim; ++i) {
                for (int j = 0; j < dim; ++j) m(i, j) = parse_double(f[col++], "trajectory");
            }
            d.a_hat.push_back(m);
        }
    }
    return d;
}

void write_curve_csv(const DeceptionCostCurve& curve, std::ostream& out) {
    out << "n,C_hat,C_hat_se,C_tilde,C_tilde_se\n";
    for (std::size_t i = 0; i < curve.c_hat.size(); ++i) {
        out << curve.n_first() + static_cast<int>(i) << ',' << format_number(curve.c_hat[i]) << ','
            << format_number(i < curve.c_hat_se.size() ? curve.c_hat_se[i] : 0.0) << ','
            << format_number(i < curve.c_tilde.size() ? curve.c_tilde[i] : 0.0) << ','
            << format_number(i < curve.c_tilde_se.size() ? curve.c_tilde_se[i] : 0.0) << '\n';
    }
}

DeceptionCostCurve read_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("curve: empty input");
    const auto header = split(line, ',');
    if (header.empty() || header[0] != "n" || header.size() < 2 || header[1] != "C_hat") {
        throw std::invalid_argument("curve: header must start with n,C_hat");
    }
    DeceptionCostCurve c;
    int expected = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) throw std::invalid_argument("curve: ragged row");
        const int n = static_cast<int>(parse_double(f[0], "curve n"));
        if (expected < 0) {
            if (n < 2) throw std::invalid_argument("curve: n must start above L >= 1");
            c.exploration_length = n - 1;
        } else if (n != expected) {
            throw std::invalid_argument("curve: n must be consecutive");
        }
        expected = n + 1;
        c.c_hat.push_back(parse_double(f[1], "curve C_hat"));
        c.c_hat_se.push_back(f.size() > 2 ? parse_double(f[2], "curve C_hat_se") : 0.0);
        c.c_tilde.push_back(f.size() > 3 ? parse_double(f[3], "curve C_tilde") : 0.0);
        c.c_tilde_se.push_back(f.size() > 4 ? parse_double(f[4], "curve C_tilde_se") : 0.0);
    }
    if (c.c_hat.empty()) throw std::invalid_argument("curve: no rows");
    return c;
}

}  // namespace mitmlab
