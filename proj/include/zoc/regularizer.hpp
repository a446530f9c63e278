#pragma once

#include "zoc/core.hpp"

#include <string>

namespace zoc {

/// Feasible anchor and growth radius R: outside the R-ball around the
/// anchor, h grows faster than G times the distance.
struct AnchorRadius {
  Vector anchor;
  double radius = 0.0;
  // Set for pure L1 with lambda1 > G, where the minimizer is the anchor.
  bool degenerate = false;
};

/// Proper closed convex regularizer h with prox and linear minimization
/// oracles. Values may be +inf (indicator regularizers).
class Regularizer {
 public:
  virtual ~Regularizer() = default;

  virtual std::string name() const = 0;
  virtual double value(const Vector& x) const = 0;
  /// argmin_y h(y) + ||y - v||^2 / (2 gamma)
  virtual Vector prox(const Vector& v, double gamma) const = 0;
  /// Some y in argmin_y h(y) + <y, g>. Throws UnboundedLMO if empty.
  virtual Vector lmo(const Vector& g) const = 0;
  /// Throws NoRadius if no finite radius exists for this G.
  virtual AnchorRadius anchor_radius(double G, Eigen::Index dim) const = 0;
  /// Intrinsic dimension, or nullopt for dimension-free regularizers.
  virtual std::optional<Eigen::Index> fixed_dim() const { return std::nullopt; }
};

// Checked entry points used by the rest of the library.
double reg_value(const Regularizer& h, const Vector& x);
Vector reg_prox(const Regularizer& h, const Vector& v, double gamma);
Vector reg_lmo(const Regularizer& h, const Vector& g);
AnchorRadius reg_anchor_radius(const Regularizer& h, double G, Eigen::Index dim);

/// sign(v) * max(|v| - tau, 0), elementwise.
Vector soft_threshold(const Vector& v, double tau);

class L1Norm final : public Regularizer {
 public:
  explicit L1Norm(double lambda1);
  std::string name() const override;
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double gamma) const override;
  Vector lmo(const Vector& g) const override;
  AnchorRadius anchor_radius(double G, Eigen::Index dim) const override;
  double lambda1() const { return lambda1_; }

 private:
  double lambda1_;
};

/// (lambda2 / 2) ||x||^2
class SquaredL2 final : public Regularizer {
 public:
  explicit SquaredL2(double lambda2);
  std::string name() const override;
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double gamma) const override;
  Vector lmo(const Vector& g) const override;
  AnchorRadius anchor_radius(double G, Eigen::Index dim) const override;

 private:
  double lambda2_;
};

/// lambda1 ||x||_1 + (lambda2 / 2) ||x||^2
class ElasticNet final : public Regularizer {
 public:
  ElasticNet(double lambda1, double lambda2);
  std::string name() const override;
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double gamma) const override;
  Vector lmo(const Vector& g) const override;
  AnchorRadius anchor_radius(double G, Eigen::Index dim) const override;
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }

 private:
  double lambda1_;
  double lambda2_;
};

/// Indicator of the closed Euclidean ball B(center, radius).
class BallIndicator final : public Regularizer {
 public:
  BallIndicator(Vector center, double radius);
  std::string name() const override;
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double gamma) const override;
  Vector lmo(const Vector& g) const override;
  AnchorRadius anchor_radius(double G, Eigen::Index dim) const override;
  std::optional<Eigen::Index> fixed_dim() const override { return center_.size(); }

 private:
  Vector center_;
  double radius_;
};

/// Indicator of the box [lower, upper].
class BoxIndicator final : public Regularizer {
 public:
  BoxIndicator(Vector lower, Vector upper);
  std::string name() const override;
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double gamma) const override;
  Vector lmo(const Vector& g) const override;
  AnchorRadius anchor_radius(double G, Eigen::Index dim) const override;
  std::optional<Eigen::Index> fixed_dim() const override { return lower_.size(); }

 private:
  Vector lower_;
  Vector upper_;
};

}  // namespace zoc
