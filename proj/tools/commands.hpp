#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctmc/certificate.hpp"
#include "ctmc/model.hpp"

namespace ctmc::cli {

enum ExitCode { kSuccess = 0, kRefused = 2, kNumericFailure = 3 };

struct RunConfig {
  std::string command;
  std::filesystem::path model_path;
  std::string method = "all";  // lognorm | lyapunov | diffineq | all
  double eps = 0.5;
  bool optimize_eps = false;    // golden-section search over eps for the horizon
  std::array<double, 2> horizon{0.0, 10.0};
  double tol = 1e-10;
  double delta = 1e-3;
  std::string initial = "0";    // state index or "uniform"
  std::filesystem::path output_dir = ".";
  bool plot = false;
  bool stiff = false;
  bool dump_matrices = false;
  std::filesystem::path cert_path;
  int example = 1;
};

/// Throws ModelError on out-of-range fields.
void check_config(const RunConfig& cfg);

struct MethodOutcome {
  Method method;
  std::optional<BoundCertificate> certificate;
  std::string reason;  // why the method is not applicable
};

/// Picks the construction each method supports for this model; hypotheses
/// that fail become "not applicable" outcomes instead of errors.
MethodOutcome compute_bound(const ChainModel& model, Method method, double eps);
std::vector<Method> selected_methods(const std::string& method);

std::string certificate_filename(Method m);

int cmd_bound(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_examples(const RunConfig& cfg, std::ostream& out);

/// Runs the command named in cfg, mapping library exceptions to exit codes.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace ctmc::cli
