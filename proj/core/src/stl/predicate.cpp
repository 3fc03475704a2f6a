#include "stldro/stl/predicate.hpp"

#include <cmath>
#include <utility>

#include <Eigen/SVD>

namespace stldro::stl {

Predicate Predicate::affine(Eigen::VectorXd a, double b, std::string name) {
  Predicate p;
  p.kind_ = Kind::Affine;
  p.affine_a_ = std::move(a);
  p.affine_b_ = b;
  p.name_ = std::move(name);
  return p;
}

Predicate Predicate::norm_ball(double c, Eigen::MatrixXd mat, Eigen::VectorXd q,
                               std::string name) {
  if (mat.rows() != q.size()) {
    throw InvalidArgumentError("norm_ball predicate: rows(P) must match dim(q)");
  }
  Predicate p;
  p.kind_ = Kind::NormBall;
  p.ball_c_ = c;
  p.ball_p_ = std::move(mat);
  p.ball_q_ = std::move(q);
  p.name_ = std::move(name);
  return p;
}

Predicate Predicate::custom(Evaluator eval, std::optional<double> lipschitz,
                            std::string name, std::optional<Gradient> grad) {
  if (lipschitz && (!(std::isfinite(*lipschitz)) || *lipschitz < 0.0)) {
    throw InvalidArgumentError("custom predicate: Lipschitz constant must be finite and >= 0");
  }
  Predicate p;
  p.kind_ = Kind::Custom;
  p.custom_eval_ = std::move(eval);
  p.custom_grad_ = std::move(grad);
  p.custom_lipschitz_ = lipschitz;
  p.name_ = std::move(name);
  return p;
}

double Predicate::value(const Eigen::VectorXd& z) const {
  double v = 0.0;
  switch (kind_) {
    case Kind::Affine:
      if (affine_a_.size() == 0) {
        v = affine_b_;
      } else {
        if (affine_a_.size() != z.size()) {
          throw InvalidArgumentError("affine predicate: state dimension mismatch");
        }
        v = affine_a_.dot(z) + affine_b_;
      }
      break;
    case Kind::NormBall:
      if (ball_p_.cols() != z.size()) {
        throw InvalidArgumentError("norm-ball predicate: state dimension mismatch");
      }
      v = ball_c_ - (ball_p_ * z - ball_q_).norm();
      break;
    case Kind::Custom:
      v = custom_eval_(z);
      break;
  }
  return negated_ ? -v : v;
}

Eigen::VectorXd Predicate::gradient(const Eigen::VectorXd& z) const {
  Eigen::VectorXd g;
  switch (kind_) {
    case Kind::Affine:
      if (affine_a_.size() == 0) {
        g = Eigen::VectorXd::Zero(z.size());
      } else {
        g = affine_a_;
      }
      break;
    case Kind::NormBall: {
      const Eigen::VectorXd d = ball_p_ * z - ball_q_;
      const double n = d.norm();
      if (n < 1e-300) {
        g = Eigen::VectorXd::Zero(z.size());
      } else {
        g = -(ball_p_.transpose() * d) / n;
      }
      break;
    }
    case Kind::Custom: {
      if (custom_grad_) {
        g = (*custom_grad_)(z);
      } else {
        // central finite differences
        g.resize(z.size());
        Eigen::VectorXd zp = z;
        const double h = 1e-6;
        for (int i = 0; i < z.size(); ++i) {
          zp[i] = z[i] + h;
          const double fp = custom_eval_(zp);
          zp[i] = z[i] - h;
          const double fm = custom_eval_(zp);
          zp[i] = z[i];
          g[i] = (fp - fm) / (2.0 * h);
        }
      }
      break;
    }
  }
  return negated_ ? Eigen::VectorXd(-g) : g;
}

double Predicate::lipschitz() const {
  switch (kind_) {
    case Kind::Affine:
      return affine_a_.size() == 0 ? 0.0 : affine_a_.norm();
    case Kind::NormBall: {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(ball_p_);
      return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
    }
    case Kind::Custom:
      if (!custom_lipschitz_) {
        throw MissingLipschitzError("custom predicate '" + name_ +
                                    "' has no declared Lipschitz constant");
      }
      return *custom_lipschitz_;
  }
  return 0.0;
}

Predicate Predicate::negate() const {
  Predicate p = *this;
  p.negated_ = !negated_;
  return p;
}

bool Predicate::operator==(const Predicate& other) const {
  if (kind_ != other.kind_ || negated_ != other.negated_ || name_ != other.name_) {
    return false;
  }
  switch (kind_) {
    case Kind::Affine:
      return affine_a_ == other.affine_a_ && affine_b_ == other.affine_b_;
    case Kind::NormBall:
      return ball_c_ == other.ball_c_ && ball_p_ == other.ball_p_ &&
             ball_q_ == other.ball_q_;
    case Kind::Custom:
      // opaque evaluators: identity by name
      return true;
  }
  return false;
}

}  // namespace stldro::stl
