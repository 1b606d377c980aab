#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "ctmc/diffineq.hpp"
#include "ctmc/errors.hpp"
#include "ctmc/lognorm.hpp"
#include "ctmc/lyapunov.hpp"
#include "ctmc/matrices.hpp"
#include "ctmc/model_io.hpp"
#include "ctmc/reference_models.hpp"
#include "ctmc/svg_plot.hpp"
#include "ctmc/transient.hpp"

namespace ctmc::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void check_config(const RunConfig& cfg) {
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw ModelError("--eps must lie in (0, 1)");
  if (!(cfg.tol > 0.0)) throw ModelError("--tol must be positive");
  if (!(cfg.delta > 0.0)) throw ModelError("--delta must be positive");
  if (!(cfg.horizon[1] > cfg.horizon[0])) throw ModelError("--horizon must be increasing");
  if (cfg.horizon[0] < 0.0) throw ModelError("--horizon must start at t >= 0");
  selected_methods(cfg.method);
}

std::vector<Method> selected_methods(const std::string& method) {
  if (method == "all") return {Method::LogNorm, Method::Lyapunov, Method::DiffIneq};
  return {method_from_string(method)};
}

std::string certificate_filename(Method m) { return "certificate_" + std::string(to_string(m)) + ".json"; }

namespace {

BoundCertificate lognorm_bound(const ChainModel& model) {
  if (model.is_homogeneous()) {
    try {
      return decay_parameter_bound(model);
    } catch (const NumericError&) {
      return ergodicity_bound(model, WeightVector::unit(model.S));
    }
  }
  // Weights equalizing the column sums of the period-averaged B*.
  WeightVector d = WeightVector::unit(model.S);
  try {
    d = decay_parameter_weights(build_Bstar(model).constant_part()).weights;
  } catch (const std::exception&) {
  }
  return ergodicity_bound(model, d);
}

BoundCertificate lyapunov_bound(const ChainModel& model) {
  if (model.kind == ChainClass::BirthDeath && model.is_homogeneous()) return birth_death_l2_bound(model);
  return antisym_offdiag_bound(model, antisymmetrizing_weights(build_Bstar(model)));
}

BoundCertificate diffineq_bound(const ChainModel& model, double eps) {
  if (model.kind == ChainClass::BatchService) {
    try {
      return batch_service_bound(model, eps);
    } catch (const Refusal&) {
      if (model.S > kMaxExhaustiveS) throw;
    }
  }
  if (model.S > kMaxExhaustiveS) {
    throw Refusal("no closed-form sign-pattern construction for this structure and S > " +
                  std::to_string(kMaxExhaustiveS));
  }
  return exhaustive_bound(model, {eps, 1.0});
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m, double t) {
  std::ostringstream os;
  os << "# dim=" << m.rows() << " t=" << fmt("%.12g", t) << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << fmt("%.12g", m(i, j));
    os << "\n";
  }
  write_text(path, os.str());
}

// Samples of a trajectory column restricted to [a, b].
Series window(const Trajectory& tr, const std::vector<double>& values, double a, double b, std::string label) {
  Series s{std::move(label), {}, {}};
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.times[i] < a - 1e-12 || tr.times[i] > b + 1e-12) continue;
    s.x.push_back(tr.times[i]);
    s.y.push_back(values[i]);
  }
  return s;
}

std::vector<double> state_column(const Trajectory& tr, int k) {
  std::vector<double> v;
  v.reserve(tr.states.size());
  for (const auto& p : tr.states) v.push_back(p[k]);
  return v;
}

std::string summary_row(const std::string& method, const std::string& rate, const std::string& constant,
                        const std::string& norm, const std::string& sharp, const std::string& status) {
  std::ostringstream os;
  os << std::left << std::setw(10) << method << std::setw(16) << rate << std::setw(14) << constant << std::setw(6)
     << norm << std::setw(7) << sharp << status << "\n";
  return os.str();
}

ordered_json report_json(const ConvergenceReport& r, double t0, double t1) {
  ordered_json j;
  j["schema"] = 1;
  j["method"] = std::string(to_string(r.certificate.method));
  j["model_fingerprint"] = r.certificate.model_fingerprint;
  j["horizon"] = {t0, t1};
  j["passed"] = r.passed;
  j["max_violation"] = r.max_violation;
  j["slack"] = r.slack;
  j["min_ratio"] = r.min_ratio;
  j["compared_points"] = r.times.size();
  j["resolved_until"] = r.resolved_until;
  j["difference_drift"] = r.difference_drift;
  j["delta"] = r.delta;
  j["t_star"] = std::isfinite(r.t_star) ? ordered_json(r.t_star) : ordered_json(nullptr);
  return j;
}

}  // namespace

MethodOutcome compute_bound(const ChainModel& model, Method method, double eps) {
  MethodOutcome o{method, std::nullopt, {}};
  try {
    switch (method) {
      case Method::LogNorm: o.certificate = lognorm_bound(model); break;
      case Method::Lyapunov: o.certificate = lyapunov_bound(model); break;
      case Method::DiffIneq: o.certificate = diffineq_bound(model, eps); break;
    }
  } catch (const Refusal& e) {
    o.reason = e.what();
  } catch (const NumericError& e) {
    o.reason = std::string("numeric failure: ") + e.what();
  }
  return o;
}

int cmd_bound(const RunConfig& cfg, std::ostream& out) {
  check_config(cfg);
  const ChainModel model = load_model(cfg.model_path);
  fs::create_directories(cfg.output_dir);

  double eps = cfg.eps;
  if (cfg.optimize_eps && model.kind == ChainClass::BatchService) {
    eps = optimal_eps(model, cfg.horizon[1] - cfg.horizon[0]);
    out << "eps chosen for horizon " << cfg.horizon[1] - cfg.horizon[0] << ": " << fmt("%.6f", eps) << "\n";
  }

  if (cfg.dump_matrices) {
    const double t = cfg.horizon[0];
    write_matrix_csv(cfg.output_dir / "A.csv", build_A(model)(t), t);
    write_matrix_csv(cfg.output_dir / "B.csv", build_B(model)(t), t);
    write_matrix_csv(cfg.output_dir / "Bstar.csv", build_Bstar(model)(t), t);
  }

  out << summary_row("method", "rate(mean)", "constant", "norm", "sharp", "status");
  int applicable = 0;
  for (Method m : selected_methods(cfg.method)) {
    const MethodOutcome o = compute_bound(model, m, eps);
    if (!o.certificate) {
      out << summary_row(std::string(to_string(m)), "-", "-", "-", "-", "not applicable: " + o.reason);
      continue;
    }
    const BoundCertificate& c = *o.certificate;
    save_certificate(c, cfg.output_dir / certificate_filename(m));
    ++applicable;
    out << summary_row(std::string(to_string(m)), fmt("%.6g", c.rate.mean()), fmt("%.6g", c.constant),
                       std::string(to_string(c.norm)), c.sharp ? "yes" : "no",
                       c.ergodic_by_method() ? "ok" : "ok (rate mean <= 0: no decay proven)");
  }
  return applicable > 0 ? kSuccess : kRefused;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  check_config(cfg);
  const ChainModel model = load_model(cfg.model_path);
  fs::create_directories(cfg.output_dir);
  SolverOptions opts;
  opts.tol = cfg.tol;
  opts.implicit_midpoint = cfg.stiff;
  const Trajectory tr =
      solve_kolmogorov(model, parse_initial(cfg.initial, model.S), cfg.horizon[0], cfg.horizon[1], opts);

  {
    std::ofstream f(cfg.output_dir / "trajectory.csv", std::ios::binary);
    write_trajectory_csv(tr, f);
  }
  const std::vector<int> named{0, model.S / 2, model.S};
  {
    std::ofstream f(cfg.output_dir / "reduced.csv", std::ios::binary);
    write_reduced_csv(tr, named, f);
  }
  out << "solved " << tr.times.size() << " reported times, " << tr.steps << " steps (" << tr.rejected
      << " rejected), " << tr.renormalizations.size() << " renormalizations\n";

  if (cfg.plot) {
    const double a = cfg.horizon[0], b = cfg.horizon[1];
    const std::string ic = "X(0)=" + cfg.initial;
    write_text(cfg.output_dir / "expected_value.svg",
               line_plot({"E[X(t)]", "t", "E[X(t)]"}, {window(tr, expected_value(tr), a, b, ic)}));
    for (int k : named) {
      const std::string name = "p_" + std::to_string(k);
      write_text(cfg.output_dir / (name + ".svg"),
                 line_plot({name + "(t)", "t", name}, {window(tr, state_column(tr, k), a, b, ic)}));
    }
  }
  return kSuccess;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  check_config(cfg);
  if (cfg.cert_path.empty()) throw ModelError("validate needs --cert");
  const ChainModel model = load_model(cfg.model_path);
  const BoundCertificate cert = load_certificate(cfg.cert_path);
  fs::create_directories(cfg.output_dir);

  const Eigen::VectorXd pa = parse_initial(cfg.initial, model.S);
  const Eigen::VectorXd pb = point_mass(model.S, pa[model.S] == 1.0 ? 0 : model.S);
  ValidateOptions vo;
  vo.tol = cfg.tol;
  vo.delta = cfg.delta;
  vo.implicit_midpoint = cfg.stiff;
  const ConvergenceReport r = validate_certificate(model, cert, pa, pb, cfg.horizon[0], cfg.horizon[1], vo);
  write_text(cfg.output_dir / "validation.json", report_json(r, cfg.horizon[0], cfg.horizon[1]).dump(2) + "\n");

  out << (r.passed ? "PASS" : "FAIL") << "  max_violation=" << fmt("%.3e", r.max_violation)
      << "  min_ratio=" << fmt("%.6f", r.min_ratio) << "  compared up to t=" << fmt("%.6g", r.resolved_until)
      << "  t*=" << fmt("%.6g", r.t_star) << " (delta=" << fmt("%.3g", r.delta) << ")\n";
  return r.passed ? kSuccess : kRefused;
}

int cmd_examples(const RunConfig& cfg, std::ostream& out) {
  if (cfg.example != 1 && cfg.example != 2) throw ModelError("examples: choose 1 or 2");
  const bool first = cfg.example == 1;
  const fs::path dir = cfg.output_dir / ("example" + std::to_string(cfg.example));
  fs::create_directories(dir);

  const ChainModel model = first ? bulk_arrival_example() : bulk_service_example();
  const int S = model.S;
  save_model(model, dir / "model.json");

  const Method method = first ? Method::Lyapunov : Method::DiffIneq;
  const MethodOutcome o = compute_bound(model, method, cfg.eps);
  if (!o.certificate) throw Refusal(o.reason);
  const BoundCertificate& cert = *o.certificate;
  save_certificate(cert, dir / certificate_filename(method));

  // Comparison windows: the certificate envelope of the first example
  // collapses within milliseconds, the second needs the full figure horizon.
  const double v1 = first ? 0.01 : 14.0;
  ValidateOptions vo;
  vo.points = first ? 201 : 1401;
  vo.delta = cfg.delta;
  const ConvergenceReport rep = validate_certificate(model, cert, point_mass(S, 0), point_mass(S, S), 0.0, v1, vo);
  write_text(dir / "validation.json", report_json(rep, 0.0, v1).dump(2) + "\n");

  const double split = first ? 5.0 : 14.0;
  const std::vector<int> states = first ? std::vector<int>{0, 99, 199} : std::vector<int>{0, 20, 40};
  SolverOptions so;
  so.tol = cfg.tol;
  std::vector<Trajectory> runs;
  std::vector<std::string> labels;
  runs.push_back(solve_kolmogorov(model, point_mass(S, 0), 0.0, split + 1.0, so));
  labels.push_back("X(0)=0");
  if (!first) {
    runs.push_back(solve_kolmogorov(model, point_mass(S, S), 0.0, split + 1.0, so));
    labels.push_back("X(0)=" + std::to_string(S));
  }
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::ofstream f(dir / ("trajectory_" + labels[r].substr(5) + ".csv"), std::ios::binary);
    write_trajectory_csv(runs[r], f);
  }

  auto plot = [&](const std::string& file, const std::string& title, const std::string& ylabel,
                  const std::function<std::vector<double>(const Trajectory&)>& column, double a, double b) {
    std::vector<Series> series;
    for (std::size_t r = 0; r < runs.size(); ++r) series.push_back(window(runs[r], column(runs[r]), a, b, labels[r]));
    write_text(dir / file, line_plot({title, "t", ylabel}, series));
  };
  const std::string head = "Example " + std::to_string(cfg.example) + ": ";
  const std::string w0 = fmt("%g", split), w1 = fmt("%g", split + 1.0);
  plot("expected_value_early.svg", head + "E[X(t)], t in [0," + w0 + "]", "E[X(t)]", expected_value, 0.0, split);
  plot("expected_value_late.svg", head + "E[X(t)], t in [" + w0 + "," + w1 + "]", "E[X(t)]", expected_value, split,
       split + 1.0);
  for (int k : states) {
    const std::string name = "p_" + std::to_string(k);
    auto col = [k](const Trajectory& t) { return state_column(t, k); };
    plot(name + "_early.svg", head + name + "(t), t in [0," + w0 + "]", name, col, 0.0, split);
    plot(name + "_late.svg", head + name + "(t), t in [" + w0 + "," + w1 + "]", name, col, split, split + 1.0);
  }

  double tstar = std::numeric_limits<double>::infinity();
  try {
    tstar = find_tstar_log(cert, log_worst_gap(cert), std::log(cfg.delta));
  } catch (const Refusal&) {
  }

  ordered_json manifest;
  manifest["schema"] = 1;
  manifest["example"] = cfg.example;
  manifest["S"] = S;
  manifest["method"] = std::string(to_string(method));
  manifest["rate_mean"] = cert.rate.mean();
  manifest["constant"] = cert.constant;
  manifest["t_star_worst_gap"] = std::isfinite(tstar) ? ordered_json(tstar) : ordered_json(nullptr);
  manifest["delta"] = cfg.delta;
  manifest["validation_passed"] = rep.passed;
  manifest["validation_max_violation"] = rep.max_violation;
  ordered_json files = ordered_json::array();
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    const std::string text = read_text(p);
    files.push_back({{"file", p.filename().string()}, {"bytes", text.size()}, {"fnv1a64", fnv1a_hex(text)}});
  }
  manifest["files"] = files;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  out << head << to_string(method) << " certificate: rate mean " << fmt("%.6g", cert.rate.mean()) << ", C "
      << fmt("%.6g", cert.constant) << "\n";
  out << "validation on [0," << fmt("%g", v1) << "]: " << (rep.passed ? "PASS" : "FAIL")
      << " (max_violation " << fmt("%.3e", rep.max_violation) << ")\n";
  out << "t* (worst initial gap, delta=" << fmt("%g", cfg.delta) << "): " << fmt("%.6g", tstar) << "\n";
  out << "wrote " << paths.size() + 1 << " files to " << dir.string() << "\n";
  return rep.passed ? kSuccess : kRefused;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "bound") return cmd_bound(cfg, out);
    if (cfg.command == "solve") return cmd_solve(cfg, out);
    if (cfg.command == "validate") return cmd_validate(cfg, out);
    if (cfg.command == "examples") return cmd_examples(cfg, out);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kRefused;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kRefused;
  } catch (const Refusal& e) {
    err << "refused: " << e.what() << "\n";
    return kRefused;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kRefused;
  }
}

}  // namespace ctmc::cli
