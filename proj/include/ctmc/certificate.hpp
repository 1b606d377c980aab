#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "ctmc/rate_profile.hpp"
#include "ctmc/weights.hpp"

namespace ctmc {

enum class Method { LogNorm, Lyapunov, DiffIneq };
enum class Norm { L1, L2 };

std::string_view to_string(Method m);
std::string_view to_string(Norm n);
Method method_from_string(std::string_view s);
Norm norm_from_string(std::string_view s);

/// A proven inequality
///   ||w(t)|| <= C exp(-int_s^t rate(u) du) ||w(s)||,   t >= s >= valid_from,
/// for w = D T y, where y = (p*_1..p*_S) - (p**_1..p**_S) is the difference of
/// two solutions of the forward system restricted to states 1..S, T is the
/// all-ones upper triangular matrix and D = diag(weights).
struct BoundCertificate {
  Method method = Method::LogNorm;
  RateProfile rate;
  double constant = 1.0;
  Norm norm = Norm::L1;
  WeightVector weights;
  bool sharp = false;
  double valid_from = 0.0;

  /// Lower-bound rate, valid when w(s) is componentwise nonnegative.
  std::optional<RateProfile> lower_rate;

  /// log of the factor converting a bound on ||w|| into one on ||y||
  /// (same norm): ||y(t)|| <= exp(log_plain_factor) * C e^{-int} ||y(s)||.
  double log_plain_factor = 0.0;

  std::string model_fingerprint;

  /// Method-specific audit data (decomposition witnesses, sign patterns, eps).
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  /// Positive per-period mean of the rate: the integral diverges.
  bool ergodic_by_method() const { return rate.mean() > 0.0; }

  /// log of C exp(-int_s^t rate).
  double log_envelope(double s, double t) const;
};

inline constexpr int kCertificateSchemaVersion = 1;

nlohmann::ordered_json rate_profile_to_json(const RateProfile& r);
RateProfile rate_profile_from_json(const nlohmann::json& j);

std::string serialize_certificate(const BoundCertificate& c);
BoundCertificate parse_certificate(std::string_view text, std::string_view source = "<string>");
BoundCertificate load_certificate(const std::filesystem::path& path);
void save_certificate(const BoundCertificate& c, const std::filesystem::path& path);

/// Copy with the rate multiplied by s (falsification tests).
BoundCertificate with_scaled_rate(const BoundCertificate& c, double s);

}  // namespace ctmc
