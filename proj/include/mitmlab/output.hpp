#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mitmlab/attacker.hpp"
#include "mitmlab/harness.hpp"
#include "mitmlab/lti.hpp"
#include "mitmlab/metrics.hpp"

namespace mitmlab {

/// Column order of result CSV files.
const std::vector<std::string>& result_columns();

/// Rounds every floating-point number in `doc` to 12 significant digits.
nlohmann::json quantize(const nlohmann::json& doc);

/// `%.12g`, or an empty string for a missing value.
std::string format_number(double v);

nlohmann::json result_to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const nlohmann::json& doc);

void write_result_csv(const ExperimentResult& result, std::ostream& out);
/// Quantized, pretty-printed JSON with a trailing newline.
void write_result_json(const ExperimentResult& result, std::ostream& out);

/// Writes `<experiment>.csv` (csv format, plus the JSON mirror) or
/// `<experiment>.json`, and `<experiment>_curve_<i>.csv` for every curve
/// cell. Returns the paths written. Throws std::runtime_error on I/O failure.
std::vector<std::filesystem::path> emit_results(const ExperimentResult& result, const std::string& format,
                                                const std::filesystem::path& out_dir);

/// Trajectory dump: step, theta, x_*, v_*, y_*, u_* and, for attacked runs,
/// a_hat_ij in row-major order. The final row has empty u cells.
void write_trajectory_csv(const AttackedTrajectory& traj, std::ostream& out);
void write_trajectory_csv(const NominalTrajectory& traj, std::ostream& out);

struct TrajectoryDump {
    int dim = 0;
    Series X, V, Y, U;
    std::vector<int> theta;
    MatrixSeries a_hat;  ///< empty for nominal dumps
};
TrajectoryDump read_trajectory_csv(std::istream& in);

/// Curve table with columns n, C_hat, C_hat_se, C_tilde, C_tilde_se.
void write_curve_csv(const DeceptionCostCurve& curve, std::ostream& out);
DeceptionCostCurve read_curve_csv(std::istream& in);

}  // namespace mitmlab
