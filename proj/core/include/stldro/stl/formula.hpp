#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stldro/stl/predicate.hpp"

namespace stldro::stl {

class IntervalError : public Error {
 public:
  using Error::Error;
};

/// Raised by to_pnf when a negation sits above an Until (the grammar has no
/// Release operator, so no equivalent positive form exists here).
class UnsupportedPnfError : public Error {
 public:
  using Error::Error;
};

/// Immutable STL formula. Cheap to copy (nodes are shared), safe to share
/// across threads.
class StlFormula {
 public:
  enum class Kind { True, Pred, Not, And, Or, Until, Eventually, Always };

  static StlFormula truth();
  static StlFormula pred(Predicate p);
  static StlFormula negation(StlFormula f);
  static StlFormula conj(StlFormula lhs, StlFormula rhs);
  static StlFormula disj(StlFormula lhs, StlFormula rhs);
  static StlFormula until(int a, int b, StlFormula lhs, StlFormula rhs);
  static StlFormula eventually(int a, int b, StlFormula f);
  static StlFormula always(int a, int b, StlFormula f);

  Kind kind() const;
  const Predicate& predicate() const;
  StlFormula left() const;  // unary operand or binary lhs
  StlFormula right() const;
  int interval_lo() const;
  int interval_hi() const;

  /// Minimal N such that robustness at k=0 reads only z_0..z_N.
  int horizon() const;

  /// Negation only directly above predicates?
  bool is_pnf() const;

  /// Equivalent formula with negations pushed into the predicates.
  StlFormula to_pnf() const;

  /// Canonical concrete syntax; parse_formula round-trips it.
  std::string to_string() const;

  /// All predicates appearing in the formula (preorder, with repeats).
  std::vector<Predicate> predicates() const;

  /// L1: maximum predicate Lipschitz constant (0 for predicate-free formulas).
  double max_predicate_lipschitz() const;

  bool operator==(const StlFormula& other) const;

  struct Node;
  const Node* node() const { return node_.get(); }

 private:
  explicit StlFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct StlFormula::Node {
  Kind kind;
  std::shared_ptr<const Predicate> pred;  // Pred
  std::shared_ptr<const Node> left;       // unary / binary lhs
  std::shared_ptr<const Node> right;      // binary rhs
  int lo = 0;                             // temporal interval [lo, hi]
  int hi = 0;
};

/// Finite run z_0..z_N of the augmented system.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<Eigen::VectorXd> states);

  int length() const { return static_cast<int>(states_.size()); }  // N+1
  int horizon() const { return length() - 1; }                     // N
  int state_dim() const { return states_.empty() ? 0 : static_cast<int>(states_[0].size()); }
  const Eigen::VectorXd& state(int k) const { return states_.at(static_cast<std::size_t>(k)); }
  const std::vector<Eigen::VectorXd>& states() const { return states_; }

 private:
  std::vector<Eigen::VectorXd> states_;
};

}  // namespace stldro::stl
