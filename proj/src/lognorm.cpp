#include "ctmc/lognorm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctmc/errors.hpp"
#include "ctmc/matrices.hpp"
#include "ctmc/model_io.hpp"

namespace ctmc {

double log_norm(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ModelError("log_norm needs a nonempty square matrix");
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = m(j, j);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j) s += std::abs(m(i, j));
    }
    best = std::max(best, s);
  }
  return best;
}

RatePair alpha_functions(const MatrixFunction& bss, const PeriodGrid& grid) {
  const int n = bss.dim();
  const MatrixFunction sums = bss.transformed([](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd r = -x.colwise().sum();
    return r;
  });
  RatePair out;
  out.per_state.reserve(n);
  for (int i = 0; i < n; ++i) out.per_state.push_back(sums.entry(0, i).prune());
  out.alpha = pointwise_min(out.per_state, grid);
  out.beta = pointwise_max(out.per_state, grid);
  return out;
}

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  const double mx = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

bool same_profile(const RateProfile& a, const RateProfile& b, const PeriodGrid& grid, double tol) {
  if (a.is_exact() && b.is_exact() && a.function() == b.function()) return true;
  const auto va = a.on_grid(grid);
  const auto vb = b.on_grid(grid);
  for (std::size_t k = 0; k < va.size(); ++k) {
    if (std::abs(va[k] - vb[k]) > tol * (1.0 + std::abs(va[k]))) return false;
  }
  return true;
}

}  // namespace

double log_plain_factor_l1(const WeightVector& d) {
  // ||D T||_1: column j of D T is (d_1..d_j, 0..), the last column is largest.
  std::vector<double> logs = d.log_abs_values();
  const double log_dt = log_sum_exp(logs);
  // ||T^{-1} D^{-1}||_1: column 1 has 1/|d_1|, column j >= 2 has 2/|d_j|.
  double log_inv = -d.log_abs(0);
  for (int j = 1; j < d.size(); ++j) log_inv = std::max(log_inv, std::log(2.0) - d.log_abs(j));
  return log_dt + log_inv;
}

BoundCertificate ergodicity_bound(const ChainModel& model, const WeightVector& d, double valid_from,
                                  const PeriodGrid& grid) {
  require_valid(model);
  if (d.size() != model.S) throw ModelError("weight vector must have length S");
  if (d.is_signed()) throw ModelError("logarithmic-norm weights must be positive");

  const MatrixFunction bstar = build_Bstar(model);
  if (auto v = find_negative_offdiagonal(bstar, grid)) {
    std::ostringstream os;
    os << "B* is not essentially nonnegative: b*(" << v->row + 1 << "," << v->col + 1 << ")(t=" << v->t
       << ") = " << v->value;
    throw Refusal(os.str());
  }

  const WeightVector w = d.normalized_first();
  const RatePair rates = alpha_functions(weight_conjugate(bstar, w), grid);

  BoundCertificate c;
  c.method = Method::LogNorm;
  c.norm = Norm::L1;
  c.constant = 1.0;
  c.rate = rates.alpha;
  c.lower_rate = rates.beta;
  c.weights = w;
  c.valid_from = valid_from;
  c.sharp = same_profile(rates.alpha, rates.beta, grid, 1e-9);
  c.log_plain_factor = log_plain_factor_l1(w);
  c.model_fingerprint = model_fingerprint(model);
  c.details["alpha_mean"] = rates.alpha.mean();
  c.details["beta_mean"] = rates.beta.mean();
  return c;
}

DecayWeights decay_parameter_weights(const Eigen::MatrixXd& bstar, const PowerIterationOptions& opts) {
  const Eigen::Index n = bstar.rows();
  if (n == 0 || bstar.cols() != n) throw ModelError("decay_parameter_weights needs a square matrix");
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && bstar(i, j) < -1e-12) throw Refusal("B* is not essentially nonnegative");
    }
  }

  // The Perron vector of C' = B*^T + shift I. The minimal admissible shift is
  // max |b*_jj|; doubling it keeps the diagonal of C' strictly positive, so C'
  // is primitive and the iteration cannot oscillate.
  const double m = bstar.diagonal().cwiseAbs().maxCoeff();
  const double shift = m > 0.0 ? 2.0 * m : 1.0;
  const Eigen::MatrixXd cprime = bstar.transpose() + shift * Eigen::MatrixXd::Identity(n, n);

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  long it = 0;
  for (;; ++it) {
    if (it >= opts.max_iterations) {
      throw NumericError("power iteration did not converge in " + std::to_string(opts.max_iterations) +
                         " iterations");
    }
    Eigen::VectorXd y = cprime * x;
    const double norm = y.cwiseAbs().sum();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("power iteration collapsed");
    y /= norm;
    const double diff = (y - x).cwiseAbs().maxCoeff();
    x = std::move(y);
    if (diff < opts.tolerance) break;
  }

  // Polish with shifted inverse iteration at the Rayleigh estimate.
  const double rho = x.dot(cprime * x) / x.squaredNorm();
  const double sigma = rho * (1.0 + 1e-9) + 1e-12;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(cprime - sigma * Eigen::MatrixXd::Identity(n, n));
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd y = lu.solve(x);
    if (!y.allFinite()) break;
    y /= y.sum();
    x = y;
  }

  if ((x.array() <= 0.0).any()) {
    throw NumericError("Perron vector has a non-positive component; B* is reducible");
  }

  std::vector<double> d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = x[i];
  DecayWeights out;
  out.weights = WeightVector::from_values(d).normalized_first();
  out.iterations = it + 1;

  Eigen::MatrixXd cd(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) cd(i, j) = bstar(i, j) * out.weights.ratio(i, j);
  }
  const Eigen::VectorXd col = cd.colwise().sum().transpose();
  out.alpha_star = -col.mean();
  const double spread = col.maxCoeff() - col.minCoeff();
  if (spread > 1e-9 * std::max(1.0, std::abs(out.alpha_star))) {
    std::ostringstream os;
    os << "weighted column sums differ by " << spread << " after power iteration";
    throw NumericError(os.str());
  }
  return out;
}

BoundCertificate decay_parameter_bound(const ChainModel& model, const PowerIterationOptions& opts) {
  require_valid(model);
  if (!model.is_homogeneous()) throw Refusal("decay-parameter weights need a homogeneous chain");
  const Eigen::MatrixXd bstar = build_Bstar(model)(0.0);
  const DecayWeights dw = decay_parameter_weights(bstar, opts);
  BoundCertificate c = ergodicity_bound(model, dw.weights);
  c.sharp = true;
  c.details["decay_parameter"] = dw.alpha_star;
  c.details["power_iterations"] = dw.iterations;
  return c;
}

}  // namespace ctmc
