#include "driftrec/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace driftrec::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw InvalidArgument("bad number '" + s + "'");
  return v;
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_double(cell));
  return out;
}

/// key=value tokens after the magic word of a header line.
std::map<std::string, std::string> parse_header(const std::string& line, const std::string& magic) {
  std::istringstream in(line);
  std::string hash, word;
  in >> hash >> word;
  if (hash != "#" || word != magic) throw InvalidArgument("expected header '# " + magic + "'");
  std::map<std::string, std::string> kv;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw InvalidArgument("bad header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

long long header_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw InvalidArgument("header is missing '" + key + "'");
  const double v = parse_double(it->second);
  if (v != std::floor(v) || v < 0) throw InvalidArgument("header '" + key + "' must be a count");
  return static_cast<long long>(v);
}

void write_rows(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_rows(std::istream& in, long long rows, long long cols) {
  Matrix m(rows, cols);
  std::string line;
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw InvalidArgument("file ends after " + std::to_string(i) + " rows");
    const auto row = parse_row(line);
    if (static_cast<long long>(row.size()) != cols) {
      throw InvalidArgument("row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                            " entries, expected " + std::to_string(cols));
    }
    for (long long j = 0; j < cols; ++j) m(i, j) = row[j];
  }
  return m;
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& m) {
  out << "# driftrec-matrix p=" << m.rows();
  if (m.cols() != m.rows()) out << " m=" << m.cols();
  out << '\n';
  write_rows(out, m);
}

Matrix read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty matrix file");
  const auto kv = parse_header(line, "driftrec-matrix");
  const long long p = header_int(kv, "p");
  const long long m = kv.count("m") ? header_int(kv, "m") : p;
  return read_rows(in, p, m);
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_matrix(out, m);
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_matrix(in);
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  require(traj.model_tag.find_first_of(" \t\n") == std::string::npos,
          "trajectory model tag must not contain whitespace");
  out << "# driftrec-traj p=" << traj.dim() << " n=" << traj.n()
      << " eta=" << format_double(traj.eta) << " model=" << traj.model_tag << '\n';
  write_rows(out, traj.states);
}

Trajectory read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty trajectory file");
  const auto kv = parse_header(line, "driftrec-traj");
  const long long p = header_int(kv, "p");
  const long long n = header_int(kv, "n");
  auto eta = kv.find("eta");
  if (eta == kv.end()) throw InvalidArgument("header is missing 'eta'");
  Trajectory t;
  t.eta = parse_double(eta->second);
  require(t.eta > 0.0, "trajectory eta must be positive");
  if (auto tag = kv.find("model"); tag != kv.end()) t.model_tag = tag->second;
  t.states = read_rows(in, n + 1, p);
  return t;
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_trajectory(out, traj);
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_trajectory(in);
}

std::string sign_string(const Eigen::VectorXi& signs) {
  std::string s;
  s.reserve(signs.size());
  for (Eigen::Index i = 0; i < signs.size(); ++i) s += signs(i) > 0 ? '+' : signs(i) < 0 ? '-' : '0';
  return s;
}

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// JSON has no NaN; undefined values become null.
nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
}

}  // namespace

nlohmann::json to_json(const RecoveryResult& r, const std::vector<std::string>& feature_names) {
  nlohmann::json j;
  j["lambda"] = r.lambda_used;
  j["theta_hat"] = matrix_json(r.theta_hat);
  nlohmann::json signs = nlohmann::json::array();
  nlohmann::json numeric = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.signed_support.rows(); ++i) {
    const Eigen::VectorXi row = r.signed_support.row(i).transpose();
    signs.push_back(sign_string(row));
    numeric.push_back(std::vector<int>(row.data(), row.data() + row.size()));
  }
  j["signs"] = signs;
  j["signed_support"] = numeric;
  j["iterations"] = r.per_row_iters;
  j["kkt_residual"] = r.per_row_kkt_residual;
  j["converged"] = std::vector<bool>(r.per_row_converged.begin(), r.per_row_converged.end());
  if (!feature_names.empty()) j["features"] = feature_names;
  return j;
}

nlohmann::json to_json(const AssumptionReport& r) {
  nlohmann::json j;
  j["row"] = r.row;
  j["support"] = r.support;
  j["c_min"] = number_or_null(r.c_min);
  j["alpha"] = number_or_null(r.alpha);
  j["rho_min"] = number_or_null(r.rho_min);
  j["d"] = r.d ? number_or_null(*r.d) : nlohmann::json();
  j["k"] = r.k_observed;
  j["theta_min"] = number_or_null(r.theta_min_observed);
  if (r.degenerate) j["degenerate"] = true;
  return j;
}

nlohmann::json to_json(const bounds::BoundReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["value"] = number_or_null(r.value);
  j["inputs"] = r.inputs;
  if (r.up_to_constant) j["note"] = "up to an unspecified absolute constant";
  if (r.vacuous) j["vacuous"] = true;
  return j;
}

}  // namespace driftrec::io
