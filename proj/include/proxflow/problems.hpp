#pragma once

#include <memory>
#include <optional>
#include <string>

#include "proxflow/core.hpp"

namespace proxflow {

// Smooth part g of the composite objective. beta is a global Lipschitz
// constant of the gradient.
class SmoothFn {
 public:
  virtual ~SmoothFn() = default;

  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;

  double beta() const { return beta_; }
  int dim() const { return dim_; }

 protected:
  SmoothFn(int dim, double beta) : dim_(dim), beta_(beta) {}

 private:
  int dim_;
  double beta_;
};

// Convex lower semicontinuous part f, accessed through its proximal map.
class ProxFn {
 public:
  virtual ~ProxFn() = default;

  // May return kInfinity outside dom f.
  virtual double value(const Vec& x) const = 0;

  // argmin_y f(y) + |y - x|^2 / (2 lambda)
  virtual Vec prox(double lambda, const Vec& x) const = 0;

  // min over s in the subdifferential of f at x of |s + shift|.
  // kInfinity when x is outside dom f (empty subdifferential).
  virtual double subdifferential_distance(const Vec& x, const Vec& shift) const = 0;

  int dim() const { return dim_; }

 protected:
  explicit ProxFn(int dim) : dim_(dim) {}

 private:
  int dim_;
};

// g(x) = 1/2 x'Qx - b'x with Q symmetric.
class QuadraticFn final : public SmoothFn {
 public:
  QuadraticFn(Mat q, Vec b);
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  const Mat& q() const { return q_; }
  const Vec& b() const { return b_; }

 private:
  Mat q_;
  Vec b_;
};

// g(x) = 1/2 |Mx - y|^2
class LeastSquaresFn final : public SmoothFn {
 public:
  LeastSquaresFn(Mat m, Vec y);
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;

 private:
  Mat m_;
  Vec y_;
};

// g(x) = sum_i x_i^2/2 + 2 cos(x_i). Nonconvex, g'' in [-1, 3], beta = 3.
class CosQuadFn final : public SmoothFn {
 public:
  explicit CosQuadFn(int dim);
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
};

class ZeroFn final : public ProxFn {
 public:
  explicit ZeroFn(int dim) : ProxFn(dim) {}
  double value(const Vec& x) const override;
  Vec prox(double lambda, const Vec& x) const override;
  double subdifferential_distance(const Vec& x, const Vec& shift) const override;
};

// f(x) = mu |x|_1, prox is soft thresholding at lambda * mu.
class L1NormFn final : public ProxFn {
 public:
  L1NormFn(int dim, double mu);
  double value(const Vec& x) const override;
  Vec prox(double lambda, const Vec& x) const override;
  double subdifferential_distance(const Vec& x, const Vec& shift) const override;
  double mu() const { return mu_; }

 private:
  double mu_;
};

// Indicator of the box [lower, upper]; prox is the projection.
class BoxIndicatorFn final : public ProxFn {
 public:
  BoxIndicatorFn(Vec lower, Vec upper);
  double value(const Vec& x) const override;
  Vec prox(double lambda, const Vec& x) const override;
  double subdifferential_distance(const Vec& x, const Vec& shift) const override;
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

 private:
  Vec lower_;
  Vec upper_;
};

// Composite objective f + g. Oracles are immutable and shared.
struct Objective {
  std::shared_ptr<const ProxFn> f;
  std::shared_ptr<const SmoothFn> g;

  Objective(std::shared_ptr<const ProxFn> f_, std::shared_ptr<const SmoothFn> g_);

  int dim() const { return g->dim(); }
  double beta() const { return g->beta(); }
  double value(const Vec& x) const;
};

// Parameters for the problem catalog. Which fields are required depends on
// the name: zero_quad {Q, b}, lasso {M, y, mu}, box_quad {Q, b, lower,
// upper}, cos_quad {dim, mu (optional, 0 means f = 0)}.
struct ProblemSpec {
  std::string name;
  int dim = 0;
  std::optional<Mat> Q;
  std::optional<Mat> M;
  std::optional<Vec> b;
  std::optional<Vec> y;
  std::optional<Vec> lower;
  std::optional<Vec> upper;
  double mu = 0.0;
};

Objective make_problem(const ProblemSpec& spec);

Vec prox_eval(const ProxFn& f, double lambda, const Vec& x);

// prox_{lambda f}(x - lambda grad g(x))
Vec prox_grad_map(const Objective& obj, double lambda, const Vec& x);

// (1/lambda) |x - prox_{lambda f}(x - lambda grad g(x))|; zero exactly at
// critical points of f + g.
double prox_grad_residual(const Objective& obj, double lambda, const Vec& x);

// dist(0, subdiff(f + g)(x)), computed from the explicit subdifferential.
double criticality_distance(const Objective& obj, const Vec& x);

// Largest eigenvalue of a symmetric positive semidefinite matrix by power
// iteration, stopping when the Rayleigh quotient changes by less than
// tol (relative).
double power_iteration_max_eigenvalue(const Mat& psd, double tol = 1e-10, int max_iter = 10000);

// Spectral norm of a symmetric matrix, sqrt of the top eigenvalue of Q'Q.
double symmetric_spectral_norm(const Mat& q);

}  // namespace proxflow
