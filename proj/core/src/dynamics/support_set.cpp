#include "stldro/dynamics/support_set.hpp"

#include <cmath>

namespace stldro::dyn {

SupportSet SupportSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) {
    throw InvalidArgumentError("box support: bound dimensions differ");
  }
  for (int i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
      throw InvalidArgumentError("box support: bounds must be finite with lower <= upper");
    }
  }
  SupportSet s;
  s.kind_ = Kind::Box;
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

SupportSet SupportSet::ball(Eigen::VectorXd center, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw InvalidArgumentError("ball support: radius must be finite and >= 0");
  }
  SupportSet s;
  s.kind_ = Kind::Ball;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

SupportSet SupportSet::point(int dim) {
  return ball(Eigen::VectorXd::Zero(dim), 0.0);
}

int SupportSet::dim() const {
  return kind_ == Kind::Box ? static_cast<int>(lower_.size())
                            : static_cast<int>(center_.size());
}

Eigen::VectorXd SupportSet::project(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw InvalidArgumentError("support projection: dimension mismatch");
  if (kind_ == Kind::Box) {
    return x.cwiseMax(lower_).cwiseMin(upper_);
  }
  const Eigen::VectorXd d = x - center_;
  const double n = d.norm();
  if (n <= radius_) return x;
  if (n == 0.0) return center_;
  return center_ + d * (radius_ / n);
}

bool SupportSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim()) return false;
  if (kind_ == Kind::Box) {
    return (x.array() >= lower_.array() - tol).all() &&
           (x.array() <= upper_.array() + tol).all();
  }
  return (x - center_).norm() <= radius_ + tol;
}

Eigen::VectorXd SupportSet::center() const {
  return kind_ == Kind::Box ? Eigen::VectorXd(0.5 * (lower_ + upper_)) : center_;
}

std::vector<Eigen::VectorXd> SupportSet::extreme_points() const {
  std::vector<Eigen::VectorXd> out;
  const int n = dim();
  if (kind_ == Kind::Box) {
    const Eigen::VectorXd mid = center();
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd lo = mid;
      lo[i] = lower_[i];
      Eigen::VectorXd hi = mid;
      hi[i] = upper_[i];
      out.push_back(lo);
      out.push_back(hi);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd lo = center_;
      lo[i] -= radius_;
      Eigen::VectorXd hi = center_;
      hi[i] += radius_;
      out.push_back(lo);
      out.push_back(hi);
    }
  }
  return out;
}

Eigen::VectorXd SupportSet::sample_boundary(util::SplitMix64& rng) const {
  const int n = dim();
  if (kind_ == Kind::Box) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.next_unit() < 0.5 ? lower_[i] : upper_[i];
    return x;
  }
  return center_ + radius_ * rng.unit_sphere(n);
}

Eigen::VectorXd SupportSet::sample_interior(util::SplitMix64& rng) const {
  const int n = dim();
  if (kind_ == Kind::Box) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.next_uniform(lower_[i], upper_[i]);
    return x;
  }
  // radius scaled by u^(1/n) for uniformity in the ball
  const double u = std::pow(rng.next_unit(), n > 0 ? 1.0 / n : 1.0);
  return center_ + (radius_ * u) * rng.unit_sphere(n);
}

}  // namespace stldro::dyn
