#include "ctmc/certificate.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ctmc/errors.hpp"
#include "ctmc/model_io.hpp"

namespace ctmc {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::LogNorm: return "lognorm";
    case Method::Lyapunov: return "lyapunov";
    case Method::DiffIneq: return "diffineq";
  }
  return "?";
}

std::string_view to_string(Norm n) { return n == Norm::L1 ? "l1" : "l2"; }

Method method_from_string(std::string_view s) {
  if (s == "lognorm") return Method::LogNorm;
  if (s == "lyapunov") return Method::Lyapunov;
  if (s == "diffineq") return Method::DiffIneq;
  throw ModelError("unknown method '" + std::string(s) + "'");
}

Norm norm_from_string(std::string_view s) {
  if (s == "l1") return Norm::L1;
  if (s == "l2") return Norm::L2;
  throw ModelError("unknown norm '" + std::string(s) + "'");
}

double BoundCertificate::log_envelope(double s, double t) const {
  return std::log(constant) - rate.integral(s, t);
}

ordered_json rate_profile_to_json(const RateProfile& r) {
  ordered_json j;
  if (r.is_exact()) {
    j["kind"] = "exact";
    j["function"] = rate_to_json(r.function());
  } else {
    j["kind"] = "sampled";
    j["samples"] = r.samples();
  }
  j["mean"] = r.mean();
  return j;
}

RateProfile rate_profile_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exact") return RateProfile::exact(rate_from_json(j.at("function")));
  if (kind == "sampled") return RateProfile::sampled(j.at("samples").get<std::vector<double>>());
  throw ModelError("unknown rate kind '" + kind + "'");
}

std::string serialize_certificate(const BoundCertificate& c) {
  ordered_json j;
  j["schema"] = kCertificateSchemaVersion;
  j["method"] = std::string(to_string(c.method));
  j["norm"] = std::string(to_string(c.norm));
  j["constant"] = c.constant;
  j["valid_from"] = c.valid_from;
  j["sharp"] = c.sharp;
  j["ergodic_by_method"] = c.ergodic_by_method();
  j["model_fingerprint"] = c.model_fingerprint;
  j["log_plain_factor"] = c.log_plain_factor;
  j["rate"] = rate_profile_to_json(c.rate);
  if (c.lower_rate) j["lower_rate"] = rate_profile_to_json(*c.lower_rate);
  j["weights"] = {{"log_abs", c.weights.log_abs_values()}, {"signs", c.weights.signs()}};
  j["details"] = c.details;
  return j.dump(2) + "\n";
}

BoundCertificate parse_certificate(std::string_view text, std::string_view source) {
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<int>() != kCertificateSchemaVersion) {
      throw ModelError("unsupported certificate schema " + j.at("schema").dump());
    }
    BoundCertificate c;
    c.method = method_from_string(j.at("method").get<std::string>());
    c.norm = norm_from_string(j.at("norm").get<std::string>());
    c.constant = j.at("constant").get<double>();
    c.valid_from = j.value("valid_from", 0.0);
    c.sharp = j.value("sharp", false);
    c.model_fingerprint = j.value("model_fingerprint", std::string{});
    c.log_plain_factor = j.value("log_plain_factor", 0.0);
    c.rate = rate_profile_from_json(j.at("rate"));
    if (j.contains("lower_rate")) c.lower_rate = rate_profile_from_json(j.at("lower_rate"));
    const auto& w = j.at("weights");
    c.weights = WeightVector::from_log(w.at("log_abs").get<std::vector<double>>(),
                                       w.at("signs").get<std::vector<int>>());
    if (j.contains("details")) c.details = ordered_json::parse(j.at("details").dump());
    if (!(c.constant >= 1.0) || !std::isfinite(c.constant)) {
      throw ModelError("certificate constant must be finite and >= 1");
    }
    return c;
  } catch (const json::exception& e) {
    throw ModelError(std::string(source) + ": " + e.what());
  } catch (const ModelError& e) {
    throw ModelError(std::string(source) + ": " + e.what());
  }
}

BoundCertificate load_certificate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open certificate file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_certificate(ss.str(), path.string());
}

void save_certificate(const BoundCertificate& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write certificate file " + path.string());
  out << serialize_certificate(c);
}

BoundCertificate with_scaled_rate(const BoundCertificate& c, double s) {
  BoundCertificate out = c;
  out.rate = c.rate.scaled(s);
  out.sharp = false;
  return out;
}

}  // namespace ctmc
