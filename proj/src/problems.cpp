#include "proxflow/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace proxflow {
namespace {

using detail::require;

void require_square_symmetric(const Mat& q, const char* what) {
  require(q.rows() == q.cols(), std::string(what) + " must be square");
  require(q.allFinite(), std::string(what) + " must be finite");
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  require((q - q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          std::string(what) + " must be symmetric");
}

bool is_psd(const Mat& q) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(q, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  return eig.eigenvalues().minCoeff() >= -1e-12 * scale;
}

const Vec& require_field(const std::optional<Vec>& v, const char* field, const std::string& name) {
  require(v.has_value(), name + ": missing field '" + field + "'");
  return *v;
}

const Mat& require_field(const std::optional<Mat>& m, const char* field, const std::string& name) {
  require(m.has_value(), name + ": missing field '" + field + "'");
  return *m;
}

void check_dim(const ProblemSpec& spec, int n) {
  if (spec.dim != 0)
    require(spec.dim == n, spec.name + ": dim " + std::to_string(spec.dim) +
                               " does not match data dimension " + std::to_string(n));
}

}  // namespace

double power_iteration_max_eigenvalue(const Mat& psd, double tol, int max_iter) {
  require(psd.rows() == psd.cols() && psd.rows() > 0, "power iteration needs a nonempty square matrix");
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Vec v(psd.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.1 * normal(rng);
  v.normalize();

  double rq = v.dot(psd * v);
  for (int it = 0; it < max_iter; ++it) {
    Vec w = psd * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(psd * v);
    const bool done = std::abs(next - rq) <= tol * std::max(std::abs(next), 1e-300);
    rq = next;
    if (done) break;
  }
  // |Pv| >= v'Pv for unit v and still bounded by the top eigenvalue.
  return std::max(rq, (psd * v).norm());
}

double symmetric_spectral_norm(const Mat& q) {
  const Mat gram = q.transpose() * q;
  return std::sqrt(power_iteration_max_eigenvalue(gram));
}

// --- smooth functions ---

QuadraticFn::QuadraticFn(Mat q, Vec b)
    : SmoothFn(static_cast<int>(q.rows()), symmetric_spectral_norm(q)), q_(std::move(q)), b_(std::move(b)) {}

double QuadraticFn::value(const Vec& x) const { return 0.5 * x.dot(q_ * x) - b_.dot(x); }

Vec QuadraticFn::gradient(const Vec& x) const { return q_ * x - b_; }

LeastSquaresFn::LeastSquaresFn(Mat m, Vec y)
    : SmoothFn(static_cast<int>(m.cols()), power_iteration_max_eigenvalue(m.transpose() * m)),
      m_(std::move(m)),
      y_(std::move(y)) {}

double LeastSquaresFn::value(const Vec& x) const { return 0.5 * (m_ * x - y_).squaredNorm(); }

Vec LeastSquaresFn::gradient(const Vec& x) const { return m_.transpose() * (m_ * x - y_); }

CosQuadFn::CosQuadFn(int dim) : SmoothFn(dim, 3.0) {}

double CosQuadFn::value(const Vec& x) const {
  double sum = 0.0;
  for (double xi : x) sum += 0.5 * xi * xi + 2.0 * std::cos(xi);
  return sum;
}

Vec CosQuadFn::gradient(const Vec& x) const {
  return x.unaryExpr([](double xi) { return xi - 2.0 * std::sin(xi); });
}

// --- prox functions ---

double ZeroFn::value(const Vec&) const { return 0.0; }

Vec ZeroFn::prox(double, const Vec& x) const { return x; }

double ZeroFn::subdifferential_distance(const Vec&, const Vec& shift) const { return shift.norm(); }

L1NormFn::L1NormFn(int dim, double mu) : ProxFn(dim), mu_(mu) {
  detail::require_nonnegative(mu, "mu");
}

double L1NormFn::value(const Vec& x) const { return mu_ * x.lpNorm<1>(); }

Vec L1NormFn::prox(double lambda, const Vec& x) const {
  const double t = lambda * mu_;
  return x.unaryExpr([t](double xi) {
    if (xi > t) return xi - t;
    if (xi < -t) return xi + t;
    return 0.0;
  });
}

double L1NormFn::subdifferential_distance(const Vec& x, const Vec& shift) const {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double d;
    if (x[i] > 0.0)
      d = mu_ + shift[i];
    else if (x[i] < 0.0)
      d = -mu_ + shift[i];
    else
      d = std::max(0.0, std::abs(shift[i]) - mu_);
    sq += d * d;
  }
  return std::sqrt(sq);
}

BoxIndicatorFn::BoxIndicatorFn(Vec lower, Vec upper)
    : ProxFn(static_cast<int>(lower.size())), lower_(std::move(lower)), upper_(std::move(upper)) {
  require(lower_.size() == upper_.size(), "box bounds must have equal length");
  require((lower_.array() <= upper_.array()).all(), "box must be nonempty (lower <= upper)");
}

double BoxIndicatorFn::value(const Vec& x) const {
  const bool inside = (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
  return inside ? 0.0 : kInfinity;
}

Vec BoxIndicatorFn::prox(double, const Vec& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

double BoxIndicatorFn::subdifferential_distance(const Vec& x, const Vec& shift) const {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] || x[i] > upper_[i]) return kInfinity;
    double d;
    if (lower_[i] == upper_[i])
      d = 0.0;
    else if (x[i] == lower_[i])
      d = std::max(-shift[i], 0.0);  // normal cone (-inf, 0]
    else if (x[i] == upper_[i])
      d = std::max(shift[i], 0.0);  // normal cone [0, inf)
    else
      d = shift[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

// --- objective ---

Objective::Objective(std::shared_ptr<const ProxFn> f_, std::shared_ptr<const SmoothFn> g_)
    : f(std::move(f_)), g(std::move(g_)) {
  require(f && g, "objective needs both f and g");
  require(f->dim() == g->dim(), "f and g dimensions differ");
  require(g->dim() > 0, "objective dimension must be positive");
}

double Objective::value(const Vec& x) const {
  const double fv = f->value(x);
  if (fv == kInfinity) return kInfinity;
  return fv + g->value(x);
}

Objective make_problem(const ProblemSpec& spec) {
  const std::string& name = spec.name;
  if (name == "zero_quad" || name == "box_quad") {
    const Mat& q = require_field(spec.Q, "Q", name);
    require_square_symmetric(q, "Q");
    const int n = static_cast<int>(q.rows());
    require(n > 0, name + ": Q must be nonempty");
    check_dim(spec, n);
    Vec b = spec.b ? *spec.b : Vec::Zero(n);
    require(b.size() == n, name + ": b has wrong length");
    if (name == "zero_quad") {
      require(is_psd(q), "zero_quad: Q must be positive semidefinite");
      return Objective(std::make_shared<ZeroFn>(n), std::make_shared<QuadraticFn>(q, std::move(b)));
    }
    const Vec& lo = require_field(spec.lower, "lower", name);
    const Vec& hi = require_field(spec.upper, "upper", name);
    require(lo.size() == n && hi.size() == n, "box_quad: bounds have wrong length");
    return Objective(std::make_shared<BoxIndicatorFn>(lo, hi), std::make_shared<QuadraticFn>(q, std::move(b)));
  }
  if (name == "lasso") {
    const Mat& m = require_field(spec.M, "M", name);
    const Vec& y = require_field(spec.y, "y", name);
    require(m.rows() > 0 && m.cols() > 0, "lasso: M must be nonempty");
    require(m.allFinite() && y.allFinite(), "lasso: data must be finite");
    require(y.size() == m.rows(), "lasso: y length must equal rows of M");
    const int n = static_cast<int>(m.cols());
    check_dim(spec, n);
    return Objective(std::make_shared<L1NormFn>(n, spec.mu), std::make_shared<LeastSquaresFn>(m, y));
  }
  if (name == "cos_quad") {
    require(spec.dim > 0, "cos_quad: dim must be positive");
    std::shared_ptr<const ProxFn> f;
    if (spec.mu > 0.0)
      f = std::make_shared<L1NormFn>(spec.dim, spec.mu);
    else {
      detail::require_nonnegative(spec.mu, "mu");
      f = std::make_shared<ZeroFn>(spec.dim);
    }
    return Objective(std::move(f), std::make_shared<CosQuadFn>(spec.dim));
  }
  throw InvalidArgument("unknown problem '" + name + "' (expected zero_quad, lasso, box_quad or cos_quad)");
}

Vec prox_eval(const ProxFn& f, double lambda, const Vec& x) {
  detail::require_positive(lambda, "lambda");
  require(x.size() == f.dim(), "prox: dimension mismatch");
  return f.prox(lambda, x);
}

Vec prox_grad_map(const Objective& obj, double lambda, const Vec& x) {
  return obj.f->prox(lambda, x - lambda * obj.g->gradient(x));
}

double prox_grad_residual(const Objective& obj, double lambda, const Vec& x) {
  detail::require_positive(lambda, "lambda");
  require(x.size() == obj.dim(), "residual: dimension mismatch");
  return (x - prox_grad_map(obj, lambda, x)).norm() / lambda;
}

double criticality_distance(const Objective& obj, const Vec& x) {
  return obj.f->subdifferential_distance(x, obj.g->gradient(x));
}

}  // namespace proxflow
