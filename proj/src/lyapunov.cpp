#include "ctmc/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctmc/errors.hpp"
#include "ctmc/matrices.hpp"
#include "ctmc/model_io.hpp"

namespace ctmc {

WeightVector symmetrize_bd(const ChainModel& model) {
  require_valid(model);
  if (model.kind != ChainClass::BirthDeath) throw Refusal("symmetrizing weights need a birth-death chain");
  if (!model.is_homogeneous()) throw Refusal("symmetrizing weights need constant rates");
  std::vector<double> log_d(model.S, 0.0);
  for (int k = 1; k < model.S; ++k) {
    const double lambda = model.birth_rate(k).constant();
    const double mu = model.death_rate(k).constant();
    if (!(lambda > 0.0) || !(mu > 0.0)) {
      throw Refusal("zero birth or death rate at state " + std::to_string(k));
    }
    log_d[k] = log_d[k - 1] + 0.5 * (std::log(mu) - std::log(lambda));
  }
  return WeightVector::from_log(std::move(log_d), std::vector<int>(model.S, 1));
}

namespace {

// Quadratic form matrix -B**: diagonal a_k, off-diagonal couplings o_k = b**_{k,k+1}.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
};

Tridiagonal as_tridiagonal(const Eigen::MatrixXd& bss) {
  const Eigen::Index n = bss.rows();
  if (n == 0 || bss.cols() != n) throw ModelError("B** must be square");
  const double scale = std::max(1.0, bss.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(i - j) > 1 && bss(i, j) != 0.0) throw ModelError("B** must be tridiagonal");
      if (std::abs(bss(i, j) - bss(j, i)) > 1e-12 * scale) throw ModelError("B** must be symmetric");
    }
  }
  Tridiagonal t;
  for (Eigen::Index k = 0; k < n; ++k) t.diag.push_back(-bss(k, k));
  for (Eigen::Index k = 0; k + 1 < n; ++k) t.off.push_back(bss(k, k + 1));
  return t;
}

// Elimination pivots of (-B** - beta I), in sweep order. Returns false at the
// first non-positive pivot before the terminal one.
bool sweep(const Tridiagonal& m, double beta, bool forward, std::vector<double>& pivots) {
  const std::size_t n = m.diag.size();
  pivots.assign(n, 0.0);
  auto at = [&](std::size_t step) { return forward ? step : n - 1 - step; };
  pivots[0] = m.diag[at(0)] - beta;
  for (std::size_t s = 1; s < n; ++s) {
    if (!(pivots[s - 1] > 0.0)) return false;
    const std::size_t k = at(s);
    const double o = forward ? m.off[k - 1] : m.off[k];
    pivots[s] = m.diag[k] - beta - o * o / pivots[s - 1];
  }
  return true;
}

bool below_beta_star(const Tridiagonal& m, double beta, bool forward) {
  std::vector<double> p;
  return sweep(m, beta, forward, p) && p.back() > 0.0;
}

}  // namespace

SquaresDecomposition beta_star_squares(const Eigen::MatrixXd& bss, double width) {
  const Tridiagonal m = as_tridiagonal(bss);
  const std::size_t n = m.diag.size();

  double hi = *std::min_element(m.diag.begin(), m.diag.end());
  double lo = hi;
  for (std::size_t k = 0; k < n; ++k) {
    double r = 0.0;
    if (k > 0) r += std::abs(m.off[k - 1]);
    if (k + 1 < n) r += std::abs(m.off[k]);
    lo = std::min(lo, m.diag[k] - r);
  }
  lo -= 1e-12 * std::max(1.0, std::abs(lo));

  SquaresDecomposition dec;
  bool forward = true;
  // Bisect down to the segment width, then keep halving until the midpoint
  // stops moving so the terminal remainder is as small as the arithmetic allows.
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const bool ok = below_beta_star(m, mid, forward);
    dec.direction_log.push_back({lo, hi, forward, ok});
    (ok ? lo : hi) = mid;
    forward = !forward;
    if (hi - lo < width * 1e-4) break;
  }

  dec.beta_star = lo;
  std::vector<double> p;
  if (!sweep(m, lo, true, p)) throw NumericError("completing-squares sweep infeasible at the lower bracket");
  dec.phis.assign(p.begin(), p.end() - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    dec.leads.push_back(std::sqrt(p[k]));
    dec.trails.push_back(m.off[k] / std::sqrt(p[k]));
  }
  dec.terminal = std::max(0.0, p.back());
  return dec;
}

double beta_star_eig(const Eigen::MatrixXd& bss) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-bss, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed");
  return es.eigenvalues().minCoeff();
}

double squares_residual(const Eigen::MatrixXd& bss, const SquaresDecomposition& dec) {
  const Eigen::Index n = bss.rows();
  Eigen::MatrixXd r = -bss - dec.beta_star * Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double a = dec.leads[k], b = dec.trails[k];
    r(k, k) -= a * a;
    r(k + 1, k + 1) -= b * b;
    r(k, k + 1) += a * b;
    r(k + 1, k) += a * b;
  }
  r(n - 1, n - 1) -= dec.terminal;
  return r.cwiseAbs().maxCoeff();
}

namespace {

nlohmann::ordered_json decomposition_json(const SquaresDecomposition& dec) {
  nlohmann::ordered_json j;
  j["beta_star"] = dec.beta_star;
  j["phis"] = dec.phis;
  j["leads"] = dec.leads;
  j["trails"] = dec.trails;
  j["terminal"] = dec.terminal;
  j["bisection_steps"] = dec.direction_log.size();
  return j;
}

}  // namespace

WeightVector antisymmetrizing_weights(const MatrixFunction& bstar) {
  const int n = bstar.dim();
  std::vector<double> log_d(n, 0.0);
  for (int k = 0; k + 1 < n; ++k) {
    const RateFunction upper = bstar.entry(k, k + 1);
    const RateFunction lower = bstar.entry(k + 1, k);
    // Reference coefficient: the largest one of the sub-diagonal entry.
    double ref_l = lower.constant(), ref_u = upper.constant();
    for (const auto& [f, h] : lower.harmonics()) {
      const auto it = upper.harmonics().find(f);
      const RateFunction::Harmonic hu = it == upper.harmonics().end() ? RateFunction::Harmonic{} : it->second;
      if (std::abs(h.sin_coeff) > std::abs(ref_l)) ref_l = h.sin_coeff, ref_u = hu.sin_coeff;
      if (std::abs(h.cos_coeff) > std::abs(ref_l)) ref_l = h.cos_coeff, ref_u = hu.cos_coeff;
    }
    const double r2 = ref_l != 0.0 ? -ref_u / ref_l : 0.0;
    if (!(r2 > 0.0)) {
      throw Refusal("no positive weights make b**(" + std::to_string(k + 1) + "," + std::to_string(k + 2) +
                    ") antisymmetric");
    }
    RateFunction rest = upper + r2 * lower;
    const double scale = std::max(1.0, std::abs(ref_u));
    if (rest.upper_bound() > 1e-12 * scale || rest.lower_bound() < -1e-12 * scale) {
      throw Refusal("b*(" + std::to_string(k + 1) + "," + std::to_string(k + 2) + ") and b*(" +
                    std::to_string(k + 2) + "," + std::to_string(k + 1) + ") are not proportional in time");
    }
    log_d[k + 1] = log_d[k] + 0.5 * std::log(r2);
  }
  return WeightVector::from_log(std::move(log_d), std::vector<int>(n, 1));
}

WeightVector geometric_weights(int S, double ratio) {
  if (S < 1) throw ModelError("S must be positive");
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ModelError("weight ratio must be positive");
  std::vector<double> log_d(S);
  for (int k = 0; k < S; ++k) log_d[k] = k * std::log(ratio);
  return WeightVector::from_log(std::move(log_d), std::vector<int>(S, 1));
}

double log_plain_factor_l2(const WeightVector& d) {
  const auto [T, Tinv] = transform_T(d.size());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(T);
  const auto& sv = svd.singularValues();
  return d.log_spread() + std::log(sv(0) / sv(sv.size() - 1));
}

BoundCertificate birth_death_l2_bound(const ChainModel& model) {
  const WeightVector d = symmetrize_bd(model);
  for (int k = 0; k < model.S; ++k) {
    if (!(model.birth_rate(k).constant() > 0.0)) throw Refusal("birth rates must be positive");
    if (!(model.death_rate(k + 1).constant() > 0.0)) throw Refusal("death rates must be positive");
  }
  const Eigen::MatrixXd bss = weight_conjugate(build_Bstar(model), d)(0.0);
  // Symmetric up to the rounding of sqrt(mu/lambda); average the two triangles.
  const Eigen::MatrixXd sym = 0.5 * (bss + bss.transpose());
  const SquaresDecomposition dec = beta_star_squares(sym);

  BoundCertificate c;
  c.method = Method::Lyapunov;
  c.norm = Norm::L2;
  c.constant = 1.0;
  c.rate = RateProfile::exact(RateFunction(dec.beta_star));
  c.weights = d;
  c.sharp = true;
  c.log_plain_factor = log_plain_factor_l2(d);
  c.model_fingerprint = model_fingerprint(model);
  c.details["construction"] = "symmetrized birth-death, completing squares";
  c.details["decomposition"] = decomposition_json(dec);
  return c;
}

BoundCertificate antisym_offdiag_bound(const ChainModel& model, const WeightVector& d,
                                       const PeriodGrid& grid) {
  require_valid(model);
  if (d.size() != model.S) throw ModelError("weight vector must have length S");
  if (d.is_signed()) throw ModelError("Lyapunov weights must be positive");
  const MatrixFunction bss = weight_conjugate(build_Bstar(model), d);
  const int n = bss.dim();

  // Off-diagonal antisymmetry, coefficient-wise (then it holds for every t).
  const MatrixFunction sym = bss.transformed([](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd s = x + x.transpose();
    s.diagonal().setZero();
    return s;
  });
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const RateFunction e = sym.entry(i, j);
      if (e.upper_bound() <= 1e-9 && e.lower_bound() >= -1e-9) continue;
      for (int k = 0; k < grid.points; ++k) {
        const double t = grid.node(k);
        if (std::abs(e(t)) > 1e-9) {
          std::ostringstream os;
          os << "off-diagonal part of D B* D^-1 is not antisymmetric: b**(" << i + 1 << "," << j + 1
             << ") + b**(" << j + 1 << "," << i + 1 << ") = " << e(t) << " at t=" << t;
          throw Refusal(os.str());
        }
      }
    }
  }

  std::vector<RateFunction> neg_diag;
  neg_diag.reserve(n);
  for (int k = 0; k < n; ++k) neg_diag.push_back((-bss.entry(k, k)).prune());

  BoundCertificate c;
  c.method = Method::Lyapunov;
  c.norm = Norm::L2;
  c.constant = 1.0;
  c.rate = pointwise_min(neg_diag, grid);
  c.weights = d;
  c.sharp = false;
  c.log_plain_factor = log_plain_factor_l2(d);
  c.model_fingerprint = model_fingerprint(model);
  c.details["construction"] = "antisymmetric off-diagonal, min of -diag(B**)";
  return c;
}

BoundCertificate batch_arrival_bound(const ChainModel& model, const PeriodGrid& grid) {
  require_valid(model);
  if (model.kind != ChainClass::BatchArrival) throw Refusal("batch_arrival_bound needs a batch-arrival chain");
  if (!model.is_homogeneous()) throw Refusal("batch_arrival_bound needs constant rates");
  if (model.S < 2) throw Refusal("batch_arrival_bound needs S >= 2");
  if (model.arrival_rate(1).constant() != 0.0) throw Refusal("single arrivals must be absent (q_{k,k+1} = 0)");
  const double lambda = model.arrival_rate(2).constant();
  if (!(lambda > 0.0)) throw Refusal("batch arrival rate must be positive");
  for (int k = 2; k <= model.S; ++k) {
    if (model.arrival_rate(k).constant() != lambda) {
      throw Refusal("batch arrival rates must all equal lambda for sizes >= 2");
    }
  }
  std::vector<double> log_d(model.S, 0.0);
  for (int k = 1; k <= model.S; ++k) {
    const double mu = model.death_rate(k).constant();
    if (!(mu > 0.0)) throw Refusal("death rates must be positive");
    if (k < model.S) log_d[k] = log_d[k - 1] + 0.5 * (std::log(mu) - std::log(lambda));
  }
  const WeightVector d = WeightVector::from_log(std::move(log_d), std::vector<int>(model.S, 1));
  BoundCertificate c = antisym_offdiag_bound(model, d, grid);
  c.details["construction"] = "batch arrivals, d_{k+1} = d_k sqrt(mu_k/lambda)";
  return c;
}

}  // namespace ctmc
