#pragma once

#include <map>
#include <string>

#include "stldro/stl/formula.hpp"

namespace stldro::stl {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  int position() const { return position_; }

 private:
  int position_;
};

class UnknownPredicateError : public Error {
 public:
  using Error::Error;
};

/// Named predicates referenced from formula text.
using PredicateRegistry = std::map<std::string, Predicate>;

/// Parses the concrete STL syntax:
///
///   phi := "true" | name | "affine(a1, ..., an; b)"
///        | "ball(c; p11, ..., pmn; q1, ..., qm)"
///        | "!" phi | phi "&" phi | phi "|" phi
///        | phi "U[a,b]" phi | "F[a,b]" phi | "G[a,b]" phi | "(" phi ")"
///
/// "!" and the prefix temporal operators bind tightest, then "U", then "&",
/// then "|". Intervals are non-negative integers with a <= b. ball() lists P
/// row-major; its column count is inferred from count(P)/count(q).
StlFormula parse_formula(const std::string& text,
                         const PredicateRegistry& registry = {});

}  // namespace stldro::stl
