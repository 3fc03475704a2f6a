#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "stldro/util/errors.hpp"

namespace stldro::stl {

class MissingLipschitzError : public Error {
 public:
  using Error::Error;
};

/// Atomic predicate alpha(z) >= 0 over the augmented state, together with
/// its Lipschitz constant w.r.t. the state 2-norm.
///
/// Three shapes are supported:
///   affine    alpha(z) = a'z + b,             L = |a|_2
///   norm-ball alpha(z) = c - |P z - q|_2,     L = sigma_max(P)
///   custom    opaque evaluator,               L declared by the caller
///
/// A predicate may carry a `negated` flag (set when positive normal form
/// absorbs a negation); it evaluates -alpha and keeps the same L.
class Predicate {
 public:
  enum class Kind { Affine, NormBall, Custom };

  using Evaluator = std::function<double(const Eigen::VectorXd&)>;
  using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  /// a'z + b. An empty `a` makes a constant predicate usable on any state
  /// dimension.
  static Predicate affine(Eigen::VectorXd a, double b, std::string name = "");

  /// c - |P z - q|.
  static Predicate norm_ball(double c, Eigen::MatrixXd p, Eigen::VectorXd q,
                             std::string name = "");

  /// Opaque evaluator with a declared Lipschitz constant. An analytic
  /// gradient is optional; when absent, central finite differences are used.
  static Predicate custom(Evaluator eval, std::optional<double> lipschitz,
                          std::string name = "",
                          std::optional<Gradient> grad = std::nullopt);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool negated() const { return negated_; }

  double value(const Eigen::VectorXd& z) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;

  /// Lipschitz constant w.r.t. the state 2-norm; throws
  /// MissingLipschitzError for custom predicates without a declared value.
  double lipschitz() const;

  /// Same predicate evaluating -alpha (L unchanged).
  Predicate negate() const;

  bool operator==(const Predicate& other) const;

  // Shape parameters, valid for the matching kind.
  const Eigen::VectorXd& affine_a() const { return affine_a_; }
  double affine_b() const { return affine_b_; }
  double ball_c() const { return ball_c_; }
  const Eigen::MatrixXd& ball_p() const { return ball_p_; }
  const Eigen::VectorXd& ball_q() const { return ball_q_; }

 private:
  Predicate() = default;

  Kind kind_ = Kind::Affine;
  std::string name_;
  bool negated_ = false;

  Eigen::VectorXd affine_a_;
  double affine_b_ = 0.0;

  double ball_c_ = 0.0;
  Eigen::MatrixXd ball_p_;
  Eigen::VectorXd ball_q_;

  Evaluator custom_eval_;
  std::optional<Gradient> custom_grad_;
  std::optional<double> custom_lipschitz_;
};

}  // namespace stldro::stl
