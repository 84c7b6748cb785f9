#pragma once

// File formats: dataset CSV ("x1..xd,weight[,label]") and certificate JSON.
//
// A certificate stores only the raw inputs of the clustering test: the data,
// lambda, the primal x, the (feasible) dual delta and the claimed partition.
// verify_certificate() rebuilds every derived quantity from those.

#include "soncert/certify.hpp"
#include "soncert/experiments.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace soncert {

inline constexpr const char* kCertificateSchema = "soncert.certificate";
inline constexpr int kCertificateVersion = 1;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a dataset CSV. Labels, when present, fill sample.truth.labels.
Sample read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const std::filesystem::path& path, const Sample& sample);

/// Formats a double so that it parses back to the same value.
std::string format_real(double v);

nlohmann::json certificate_to_json(const Dataset& ds, const Certificate& cert);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

/// 64-bit FNV-1a of the compact JSON text, as 16 hex digits.
std::string certificate_digest(const nlohmann::json& doc);

struct VerifyResult {
  bool pass = false;
  /// Name of the first failed condition: schema, dimension, data_mismatch,
  /// non_finite, partition, dual_feasibility, primal_feasibility, identity,
  /// cgr or separation. Empty on success.
  std::string violation;
  std::string detail;
  double mu = 0.0;  ///< recomputed gap (valid once the pair is feasible)
  int clusters = 0;
};

/// Recomputes the clustering test from the certificate's (x, delta) and
/// partition. The stored data must match `data` exactly.
VerifyResult verify_certificate(const nlohmann::json& doc, const Sample& data);
VerifyResult verify_certificate(const std::filesystem::path& cert_path,
                                const std::filesystem::path& data_path);

}  // namespace soncert
