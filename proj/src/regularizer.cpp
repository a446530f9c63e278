#include "zoc/regularizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace zoc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Vector soft_threshold(const Vector& v, double tau) {
  return v.unaryExpr([tau](double a) {
    const double m = std::abs(a) - tau;
    return m > 0.0 ? std::copysign(m, a) : 0.0;
  });
}

double reg_value(const Regularizer& h, const Vector& x) {
  if (auto d = h.fixed_dim()) check_dim(x, *d, "reg_value");
  return h.value(x);
}

Vector reg_prox(const Regularizer& h, const Vector& v, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("reg_prox: gamma must be positive");
  if (auto d = h.fixed_dim()) check_dim(v, *d, "reg_prox");
  return h.prox(v, gamma);
}

Vector reg_lmo(const Regularizer& h, const Vector& g) {
  if (auto d = h.fixed_dim()) check_dim(g, *d, "reg_lmo");
  return h.lmo(g);
}

AnchorRadius reg_anchor_radius(const Regularizer& h, double G, Eigen::Index dim) {
  if (!(G > 0.0)) throw InvalidArgument("reg_anchor_radius: G must be positive");
  if (dim < 1) throw InvalidArgument("reg_anchor_radius: dim must be >= 1");
  if (auto d = h.fixed_dim(); d && *d != dim) {
    throw DimensionError("reg_anchor_radius: regularizer dimension mismatch");
  }
  return h.anchor_radius(G, dim);
}

//---------------------------------------------------------------------------//
// L1Norm
//---------------------------------------------------------------------------//

L1Norm::L1Norm(double lambda1) : lambda1_(lambda1) { require_positive(lambda1, "lambda1"); }

std::string L1Norm::name() const { return "l1(" + fmt_double(lambda1_) + ")"; }

double L1Norm::value(const Vector& x) const { return lambda1_ * x.lpNorm<1>(); }

Vector L1Norm::prox(const Vector& v, double gamma) const {
  return soft_threshold(v, gamma * lambda1_);
}

Vector L1Norm::lmo(const Vector& g) const {
  const double ginf = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
  if (ginf > lambda1_) {
    throw UnboundedLMO("l1: ||g||_inf = " + fmt_double(ginf) + " exceeds lambda1 = " +
                       fmt_double(lambda1_));
  }
  return Vector::Zero(g.size());
}

AnchorRadius L1Norm::anchor_radius(double G, Eigen::Index dim) const {
  if (lambda1_ <= G) {
    throw NoRadius("l1: lambda1 = " + fmt_double(lambda1_) + " <= G = " + fmt_double(G));
  }
  // lambda1 ||x||_1 >= lambda1 ||x|| > G ||x|| for every x != 0, so any
  // positive radius works and the minimizer collapses to the anchor.
  return {Vector::Zero(dim), 1.0, true};
}

//---------------------------------------------------------------------------//
// SquaredL2
//---------------------------------------------------------------------------//

SquaredL2::SquaredL2(double lambda2) : lambda2_(lambda2) { require_positive(lambda2, "lambda2"); }

std::string SquaredL2::name() const { return "sq_l2(" + fmt_double(lambda2_) + ")"; }

double SquaredL2::value(const Vector& x) const { return 0.5 * lambda2_ * x.squaredNorm(); }

Vector SquaredL2::prox(const Vector& v, double gamma) const { return v / (1.0 + gamma * lambda2_); }

Vector SquaredL2::lmo(const Vector& g) const { return -g / lambda2_; }

AnchorRadius SquaredL2::anchor_radius(double G, Eigen::Index dim) const {
  return {Vector::Zero(dim), 2.0 * G / lambda2_, false};
}

//---------------------------------------------------------------------------//
// ElasticNet
//---------------------------------------------------------------------------//

ElasticNet::ElasticNet(double lambda1, double lambda2) : lambda1_(lambda1), lambda2_(lambda2) {
  require_positive(lambda1, "lambda1");
  require_positive(lambda2, "lambda2");
}

std::string ElasticNet::name() const {
  return "elastic_net(" + fmt_double(lambda1_) + "," + fmt_double(lambda2_) + ")";
}

double ElasticNet::value(const Vector& x) const {
  return lambda1_ * x.lpNorm<1>() + 0.5 * lambda2_ * x.squaredNorm();
}

Vector ElasticNet::prox(const Vector& v, double gamma) const {
  return soft_threshold(v, gamma * lambda1_) / (1.0 + gamma * lambda2_);
}

Vector ElasticNet::lmo(const Vector& g) const { return -soft_threshold(g, lambda1_) / lambda2_; }

AnchorRadius ElasticNet::anchor_radius(double G, Eigen::Index dim) const {
  // (lambda2/2) ||x||^2 > G ||x|| once ||x|| > 2G/lambda2; the L1 part only helps.
  return {Vector::Zero(dim), 2.0 * G / lambda2_, false};
}

//---------------------------------------------------------------------------//
// BallIndicator
//---------------------------------------------------------------------------//

BallIndicator::BallIndicator(Vector center, double radius)
    : center_(std::move(center)), radius_(radius) {
  require_positive(radius, "ball radius");
  if (center_.size() < 1) throw InvalidArgument("ball center must be non-empty");
}

std::string BallIndicator::name() const { return "ball(" + fmt_double(radius_) + ")"; }

// Projections and LMO points can land a few ulps outside the sphere, so
// membership allows a relative slack of 1e-12.
double BallIndicator::value(const Vector& x) const {
  return (x - center_).norm() <= radius_ * (1.0 + 1e-12) ? 0.0 : kInf;
}

Vector BallIndicator::prox(const Vector& v, double /*gamma*/) const {
  const Vector diff = v - center_;
  const double n = diff.norm();
  if (n <= radius_) return v;
  return center_ + (radius_ / n) * diff;
}

Vector BallIndicator::lmo(const Vector& g) const {
  const double n = g.norm();
  if (n == 0.0) return center_;
  return center_ - (radius_ / n) * g;
}

AnchorRadius BallIndicator::anchor_radius(double /*G*/, Eigen::Index /*dim*/) const {
  return {center_, radius_, false};
}

//---------------------------------------------------------------------------//
// BoxIndicator
//---------------------------------------------------------------------------//

BoxIndicator::BoxIndicator(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1 || lower_.size() != upper_.size()) {
    throw InvalidArgument("box bounds must be non-empty and of equal length");
  }
  if (!(lower_.array() < upper_.array()).all() || !lower_.allFinite() || !upper_.allFinite()) {
    throw InvalidArgument("box bounds must be finite with lower < upper componentwise");
  }
}

std::string BoxIndicator::name() const { return "box"; }

double BoxIndicator::value(const Vector& x) const {
  return ((x.array() >= lower_.array()) && (x.array() <= upper_.array())).all() ? 0.0 : kInf;
}

Vector BoxIndicator::prox(const Vector& v, double /*gamma*/) const {
  return v.cwiseMax(lower_).cwiseMin(upper_);
}

Vector BoxIndicator::lmo(const Vector& g) const {
  Vector y(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g[i] > 0.0) {
      y[i] = lower_[i];
    } else if (g[i] < 0.0) {
      y[i] = upper_[i];
    } else {
      y[i] = 0.5 * (lower_[i] + upper_[i]);
    }
  }
  return y;
}

AnchorRadius BoxIndicator::anchor_radius(double /*G*/, Eigen::Index /*dim*/) const {
  return {0.5 * (lower_ + upper_), 0.5 * (upper_ - lower_).norm(), false};
}

}  // namespace zoc
