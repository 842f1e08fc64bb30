#pragma once

#include "driftrec/bounds.hpp"
#include "driftrec/common.hpp"
#include "driftrec/estimator.hpp"
#include "driftrec/lyapunov.hpp"
#include "driftrec/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace driftrec::io {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// Matrix file: `# driftrec-matrix p=<rows>` (plus ` m=<cols>` when not
/// square), then one comma-separated line per row.
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

/// Trajectory file: `# driftrec-traj p=<dim> n=<transitions> eta=<eta> model=<tag>`,
/// then n+1 comma-separated state rows.
void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory load_trajectory(const std::filesystem::path& path);

/// Signs of one row as a string over {-,0,+}.
std::string sign_string(const Eigen::VectorXi& signs);

nlohmann::json to_json(const RecoveryResult& r, const std::vector<std::string>& feature_names = {});
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const bounds::BoundReport& r);

}  // namespace driftrec::io
