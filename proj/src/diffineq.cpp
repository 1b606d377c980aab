#include "ctmc/diffineq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ctmc/errors.hpp"
#include "ctmc/lognorm.hpp"
#include "ctmc/matrices.hpp"
#include "ctmc/model_io.hpp"

namespace ctmc {

SignPattern::SignPattern(std::vector<int> signs) : signs_(std::move(signs)) {
  for (std::size_t i = 0; i < signs_.size(); ++i) {
    if (signs_[i] != 1 && signs_[i] != -1) throw ModelError("sign pattern entries must be +1 or -1");
    if (i > 0 && signs_[i] != signs_[i - 1]) changes_.push_back(static_cast<int>(i));
  }
}

SignPattern SignPattern::from_index(unsigned long index, int S) {
  std::vector<int> s(S, 1);
  for (int i = 1; i < S; ++i) s[i] = (index >> (i - 1)) & 1UL ? -s[i - 1] : s[i - 1];
  return SignPattern(std::move(s));
}

std::string SignPattern::to_string() const {
  std::string out;
  for (int s : signs_) out += s > 0 ? '+' : '-';
  return out;
}

WeightVector template_weights(const SignPattern& pattern, double eps) {
  const int S = pattern.size();
  if (S == 0) throw ModelError("empty sign pattern");
  if (!(eps > 0.0 && eps <= 1.0)) throw ModelError("eps must lie in (0, 1]");
  const double le = std::log(eps);
  std::vector<double> log_abs(S);
  int start = 0;
  while (start < S) {
    int m = start;
    while (m + 1 < S && pattern.signs()[m + 1] == pattern.signs()[start]) ++m;
    // 1-based: block [start+1, m+1], exponent S - (m+1) + 1 + (i - start).
    for (int i = start; i <= m; ++i) log_abs[i] = (S - m + (i - start)) * le;
    start = m + 1;
  }
  return WeightVector::from_log(std::move(log_abs), pattern.signs());
}

namespace {

RateProfile profile_min(const std::vector<RateProfile>& ps, const PeriodGrid& grid) {
  if (std::all_of(ps.begin(), ps.end(), [](const RateProfile& p) { return p.is_exact(); })) {
    std::vector<RateFunction> fs;
    for (const auto& p : ps) fs.push_back(p.function());
    return pointwise_min(fs, grid);
  }
  std::vector<double> v(grid.points, std::numeric_limits<double>::infinity());
  for (const auto& p : ps) {
    const auto s = p.on_grid(grid);
    for (int k = 0; k < grid.points; ++k) v[k] = std::min(v[k], s[k]);
  }
  return RateProfile::sampled(std::move(v));
}

double log_template_ratio(double eps, int S) { return (S - 1) * -std::log(eps); }

}  // namespace

PatternBound pattern_alpha(const MatrixFunction& bstar, const WeightVector& d, const PeriodGrid& grid) {
  if (d.size() != bstar.dim()) throw ModelError("weight vector must match B* dimension");
  const MatrixFunction tilde = conjugate_by_weights(bstar, d);
  const MatrixFunction sums = tilde.transformed([](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd r = -x.colwise().sum();
    return r;
  });
  std::vector<RateFunction> cols;
  for (int j = 0; j < bstar.dim(); ++j) cols.push_back(sums.entry(0, j).prune());

  PatternBound pb;
  std::vector<int> signs(d.size());
  for (int i = 0; i < d.size(); ++i) signs[i] = d.sign(i);
  pb.pattern = SignPattern(std::move(signs));
  pb.d = d;
  pb.alpha_D = pointwise_min(cols, grid);
  return pb;
}

BoundCertificate batch_service_bound(const ChainModel& model, double eps, const PeriodGrid& grid) {
  require_valid(model);
  if (!(eps > 0.0 && eps < 1.0)) throw ModelError("eps must lie in (0, 1)");
  if (model.kind != ChainClass::BatchService) throw Refusal("batch_service_bound needs a batch-service chain");
  const int S = model.S;
  const RateFunction lambda = model.birth_rate(0);
  for (int k = 1; k < S; ++k) {
    if (!(model.birth_rate(k) == lambda)) throw Refusal("arrival intensity must not depend on the state");
  }
  for (int k = 1; k < S; ++k) {
    if (!model.service_rate(k).is_constant() || model.service_rate(k).constant() != 0.0) {
      throw Refusal("only the batch of size S may be served");
    }
  }
  const RateFunction b = model.service_rate(S);

  BoundCertificate c;
  c.method = Method::DiffIneq;
  c.norm = Norm::L1;
  c.weights = WeightVector::unit(S);
  c.log_plain_factor = log_plain_factor_l1(c.weights);
  c.model_fingerprint = model_fingerprint(model);
  c.details["construction"] = "pure batch service, eps-power templates";
  c.details["eps"] = eps;

  if (S == 1) {
    // Single coordinate: x' = -(lambda + b) x.
    c.rate = RateProfile::exact((lambda + b).prune());
    c.constant = 1.0;
    return c;
  }

  double geometric = 0.0;  // sum_{j=1}^{S-1} eps^j
  for (int j = 1; j < S; ++j) geometric += std::pow(eps, j);
  const RateFunction within = ((1.0 - eps) * lambda).prune();
  const RateFunction last_column = (lambda + (1.0 - geometric) * b).prune();
  const RateFunction fs[] = {within, last_column};
  c.rate = pointwise_min(fs, grid);
  c.details["last_column_binding"] = !(c.rate.is_exact() && c.rate.function() == within);

  const double log_c = log_template_ratio(eps, S);
  if (log_c > std::log(std::numeric_limits<double>::max())) {
    throw NumericError("constant eps^(1-S) overflows; choose a larger eps");
  }
  c.constant = std::exp(log_c);
  return c;
}

double optimal_eps(const ChainModel& model, double horizon, const PeriodGrid& grid) {
  if (!(horizon > 0.0)) throw ModelError("horizon must be positive");
  auto objective = [&](double eps) {
    const BoundCertificate c = batch_service_bound(model, eps, grid);
    return c.rate.mean() - std::log(c.constant) / horizon;
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  // Keep eps^{1-S} finite: eps >= exp(-700 / (S - 1)).
  double a = model.S > 1 ? std::max(1e-3, std::exp(-700.0 / (model.S - 1))) : 1e-3;
  double b = 1.0 - 1e-3;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = objective(x1);
    }
  }
  return 0.5 * (a + b);
}

ExhaustiveResult exhaustive_alpha(const MatrixFunction& bstar, const std::vector<double>& eps_grid,
                                  const PeriodGrid& grid) {
  const int S = bstar.dim();
  if (S < 1) throw ModelError("empty B*");
  if (S > kMaxExhaustiveS) {
    throw Refusal("exhaustive sign-pattern search is limited to S <= " + std::to_string(kMaxExhaustiveS));
  }
  if (eps_grid.empty()) throw ModelError("eps grid is empty");
  for (double e : eps_grid) {
    if (!(e > 0.0 && e <= 1.0)) throw ModelError("eps grid values must lie in (0, 1]");
  }

  ExhaustiveResult r;
  const unsigned long count = 1UL << (S - 1);
  r.per_pattern.reserve(count);
  double log_c = 0.0;
  double worst_mean = std::numeric_limits<double>::infinity();
  std::vector<RateProfile> chosen;
  for (unsigned long idx = 0; idx < count; ++idx) {
    const SignPattern pattern = SignPattern::from_index(idx, S);
    PatternBound best;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (double e : eps_grid) {
      PatternBound pb = pattern_alpha(bstar, template_weights(pattern, e), grid);
      pb.eps = e;
      const double m = pb.alpha_D.mean();
      if (m > best_mean) {
        best_mean = m;
        best = std::move(pb);
      }
    }
    log_c = std::max(log_c, best.d.log_spread());
    if (best_mean < worst_mean) {
      worst_mean = best_mean;
      r.worst_pattern = pattern;
      r.worst_eps = best.eps;
    }
    chosen.push_back(best.alpha_D);
    r.per_pattern.push_back(std::move(best));
  }
  r.alpha_star = profile_min(chosen, grid);
  r.constant = std::exp(log_c);
  return r;
}

BoundCertificate assemble_certificate(const RateProfile& alpha_star, double eps, int S) {
  if (S < 1) throw ModelError("S must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw ModelError("eps must lie in (0, 1]");
  BoundCertificate c;
  c.method = Method::DiffIneq;
  c.norm = Norm::L1;
  c.rate = alpha_star;
  c.constant = std::exp(log_template_ratio(eps, S));
  if (!std::isfinite(c.constant)) throw NumericError("constant eps^(1-S) overflows");
  c.weights = WeightVector::unit(S);
  c.log_plain_factor = log_plain_factor_l1(c.weights);
  c.details["eps"] = eps;
  return c;
}

BoundCertificate assemble_certificate(const ExhaustiveResult& r, int S) {
  BoundCertificate c = assemble_certificate(r.alpha_star, 1.0, S);
  c.constant = r.constant;
  c.details["eps"] = r.worst_eps;
  c.details["worst_pattern"] = r.worst_pattern.to_string();
  c.details["patterns"] = r.per_pattern.size();
  return c;
}

BoundCertificate exhaustive_bound(const ChainModel& model, const std::vector<double>& eps_grid,
                                  const PeriodGrid& grid) {
  require_valid(model);
  const ExhaustiveResult r = exhaustive_alpha(build_Bstar(model), eps_grid, grid);
  BoundCertificate c = assemble_certificate(r, model.S);
  c.model_fingerprint = model_fingerprint(model);
  c.details["construction"] = "exhaustive sign patterns";
  return c;
}

}  // namespace ctmc
