#include "soncert/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace soncert {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_real(const std::string& text, const std::filesystem::path& path, int line_no) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    std::ostringstream msg;
    msg << path.string() << ":" << line_no << ": cannot parse number '" << text << "'";
    throw IoError(msg.str());
  }
  return value;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Sample read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset " + path.string() + " is empty");
  const auto header = split_csv_line(line);

  int dim = 0;
  while (dim < static_cast<int>(header.size()) && header[dim] == "x" + std::to_string(dim + 1)) {
    ++dim;
  }
  const bool has_label = static_cast<int>(header.size()) == dim + 2 && header[dim + 1] == "label";
  if (dim == 0 || static_cast<int>(header.size()) < dim + 1 || header[dim] != "weight" ||
      (static_cast<int>(header.size()) > dim + 1 && !has_label)) {
    throw IoError("dataset " + path.string() + ": header must be x1..xd,weight[,label]");
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected " << header.size() << " fields, got "
          << fields.size();
      throw IoError(msg.str());
    }
    std::vector<double> row;
    for (int c = 0; c <= dim; ++c) row.push_back(parse_real(fields[c], path, line_no));
    rows.push_back(std::move(row));
    if (has_label) labels.push_back(static_cast<int>(parse_real(fields[dim + 1], path, line_no)));
  }
  if (rows.empty()) throw IoError("dataset " + path.string() + " has no points");

  Sample s;
  s.a.resize(static_cast<Eigen::Index>(rows.size()), dim);
  s.r.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int c = 0; c < dim; ++c) s.a(i, c) = rows[i][c];
    s.r[i] = rows[i][dim];
  }
  s.truth.labels = std::move(labels);
  return s;
}

void write_dataset_csv(const std::filesystem::path& path, const Sample& sample) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset " + path.string());
  const bool with_labels = sample.truth.labels.size() == static_cast<std::size_t>(sample.a.rows());
  for (Eigen::Index c = 0; c < sample.a.cols(); ++c) out << "x" << c + 1 << ",";
  out << "weight" << (with_labels ? ",label" : "") << "\n";
  for (Eigen::Index i = 0; i < sample.a.rows(); ++i) {
    for (Eigen::Index c = 0; c < sample.a.cols(); ++c) out << format_real(sample.a(i, c)) << ",";
    out << format_real(sample.r[i]);
    if (with_labels) out << "," << sample.truth.labels[i];
    out << "\n";
  }
  if (!out) throw IoError("failed writing dataset " + path.string());
}

namespace {

json rows_to_json(const Points& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    out.push_back(std::move(row));
  }
  return out;
}

// Throws json::exception on type errors; shape is checked by the caller.
Points rows_from_json(const json& j, Eigen::Index cols) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of rows");
  Points m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::length_error("row " + std::to_string(i) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      // null encodes a non-finite value in JSON output
      m(static_cast<Eigen::Index>(i), c) =
          row[c].is_null() ? std::nan("") : row[c].get<double>();
    }
  }
  return m;
}

}  // namespace

json certificate_to_json(const Dataset& ds, const Certificate& cert) {
  json doc;
  doc["schema"] = kCertificateSchema;
  doc["version"] = kCertificateVersion;
  doc["n"] = ds.n();
  doc["d"] = ds.d();
  doc["lambda"] = cert.lambda;
  doc["nu"] = cert.nu;
  doc["iteration"] = cert.iteration;
  doc["method"] = to_string(cert.method);
  doc["a"] = rows_to_json(ds.a());
  doc["r"] = std::vector<double>(ds.r().data(), ds.r().data() + ds.r().size());
  doc["x"] = rows_to_json(cert.x);
  doc["delta"] = rows_to_json(cert.delta.data());
  doc["assignment"] = cert.clustering.assignment;
  // Informational only; the verifier recomputes all of these.
  doc["claimed"] = {
      {"verdict", cert.success() ? "success" : "failure"},
      {"mu", cert.mu},
      {"clusters", cert.clustering.size()},
  };
  return doc;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(1) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string certificate_digest(const json& doc) {
  const std::string text = doc.dump();
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

VerifyResult fail(std::string violation, std::string detail) {
  VerifyResult r;
  r.violation = std::move(violation);
  r.detail = std::move(detail);
  return r;
}

}  // namespace

VerifyResult verify_certificate(const json& doc, const Sample& data) {
  // Schema.
  if (!doc.is_object() || doc.value("schema", "") != kCertificateSchema) {
    return fail("schema", "not a clustering certificate");
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kCertificateVersion) {
    return fail("schema", "unsupported certificate version");
  }
  for (const char* key : {"n", "d", "lambda", "a", "r", "x", "delta", "assignment"}) {
    if (!doc.contains(key)) return fail("schema", std::string("missing field '") + key + "'");
  }

  Points a, x, delta_rows;
  Weights r;
  int n = 0, d = 0;
  double lambda = 0.0;
  std::vector<int> assignment;
  try {
    n = doc["n"].get<int>();
    d = doc["d"].get<int>();
    lambda = doc["lambda"].is_null() ? std::nan("") : doc["lambda"].get<double>();
    if (n < 1 || d < 1) return fail("dimension", "n and d must be positive");
    a = rows_from_json(doc["a"], d);
    x = rows_from_json(doc["x"], d);
    delta_rows = rows_from_json(doc["delta"], d);
    const auto rv = doc["r"].get<std::vector<json>>();
    r.resize(static_cast<Eigen::Index>(rv.size()));
    for (std::size_t i = 0; i < rv.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = rv[i].is_null() ? std::nan("") : rv[i].get<double>();
    }
    assignment = doc["assignment"].get<std::vector<int>>();
  } catch (const std::length_error& e) {
    return fail("dimension", e.what());
  } catch (const std::exception& e) {
    return fail("schema", e.what());
  }

  // Dimensions, against the certificate itself and the dataset file.
  if (a.rows() != n || x.rows() != n || r.size() != n) {
    return fail("dimension", "a, x and r must have n rows");
  }
  if (delta_rows.rows() != EdgeTable::edge_count(n)) {
    return fail("dimension", "delta must have n(n-1)/2 rows");
  }
  if (data.a.rows() != n || data.a.cols() != d) {
    return fail("dimension", "certificate and dataset differ in n or d");
  }
  if (a != data.a || r != data.r) {
    return fail("data_mismatch", "certificate data differ from the dataset file");
  }
  if (!x.allFinite() || !delta_rows.allFinite() || !std::isfinite(lambda)) {
    return fail("non_finite", "x, delta and lambda must be finite");
  }

  Dataset ds;
  try {
    ds = Dataset(a, r, lambda);
  } catch (const std::exception& e) {
    return fail("schema", e.what());
  }

  if (assignment.size() != static_cast<std::size_t>(n)) {
    return fail("partition", "assignment length differs from n");
  }
  for (int label : assignment) {
    if (label < 0) return fail("partition", "negative cluster id");
  }
  const CandidateClustering clustering = CandidateClustering::from_labels(assignment);

  EdgeTable delta(n, d);
  delta.data() = delta_rows;
  for (std::ptrdiff_t e = 0; e < delta.edges(); ++e) {
    if (delta.row(e).norm() > lambda) {
      return fail("dual_feasibility",
                  "edge " + std::to_string(e) + " has ||delta|| > lambda");
    }
  }

  const SocpPoint p = lift(ds, x, delta);
  const FeasibilityReport feas = check_feasibility(ds, p);
  if (const auto bad = feas.first_violation(); !bad.empty()) {
    return fail("primal_feasibility", "lifted point violates " + bad);
  }

  const Certificate cert = check_partition(ds, x, delta, clustering);
  VerifyResult out;
  out.mu = cert.mu;
  out.clusters = clustering.size();

  const double max_a = ds.a().rowwise().norm().maxCoeff();
  if (cert.max_identity_residual > 1e-8 * (1.0 + max_a)) {
    out.violation = "identity";
    out.detail = "q family does not reproduce the cluster centring identity";
    return out;
  }
  for (std::size_t k = 0; k < cert.clusters.size(); ++k) {
    if (!cert.clusters[k].cgr_pass) {
      std::ostringstream msg;
      msg << "cluster " << k << ": max ||q_ij|| = " << format_real(cert.clusters[k].max_q_norm)
          << " > lambda = " << format_real(lambda);
      out.violation = "cgr";
      out.detail = msg.str();
      return out;
    }
  }
  for (const auto& pair : cert.pairs) {
    if (!pair.pass) {
      std::ostringstream msg;
      msg << "clusters " << pair.first << "," << pair.second
          << ": D = " << format_real(pair.scatter) << " <= 2 mu = " << format_real(2 * cert.mu);
      out.violation = "separation";
      out.detail = msg.str();
      return out;
    }
  }
  out.pass = true;
  return out;
}

VerifyResult verify_certificate(const std::filesystem::path& cert_path,
                                const std::filesystem::path& data_path) {
  return verify_certificate(read_json(cert_path), read_dataset_csv(data_path));
}

}  // namespace soncert
