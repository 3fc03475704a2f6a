#include "stldro/stl/formula.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace stldro::stl {

namespace {

using Node = StlFormula::Node;
using Kind = StlFormula::Kind;

std::shared_ptr<const Node> make_node(Kind kind, std::shared_ptr<const Node> l,
                                      std::shared_ptr<const Node> r, int lo, int hi) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->left = std::move(l);
  n->right = std::move(r);
  n->lo = lo;
  n->hi = hi;
  return n;
}

void check_interval(int a, int b) {
  if (a < 0 || b < 0 || a > b) {
    throw IntervalError("temporal interval must satisfy 0 <= a <= b, got [" +
                        std::to_string(a) + "," + std::to_string(b) + "]");
  }
}

int horizon_of(const Node* n) {
  switch (n->kind) {
    case Kind::True:
    case Kind::Pred:
      return 0;
    case Kind::Not:
      return horizon_of(n->left.get());
    case Kind::And:
    case Kind::Or:
      return std::max(horizon_of(n->left.get()), horizon_of(n->right.get()));
    case Kind::Until:
      return n->hi + std::max(horizon_of(n->left.get()), horizon_of(n->right.get()));
    case Kind::Eventually:
    case Kind::Always:
      return n->hi + horizon_of(n->left.get());
  }
  return 0;
}

bool pnf_of(const Node* n) {
  switch (n->kind) {
    case Kind::True:
    case Kind::Pred:
      return true;
    case Kind::Not:
      return n->left->kind == Kind::Pred;
    case Kind::And:
    case Kind::Or:
    case Kind::Until:
      return pnf_of(n->left.get()) && pnf_of(n->right.get());
    case Kind::Eventually:
    case Kind::Always:
      return pnf_of(n->left.get());
  }
  return false;
}

void collect_predicates(const Node* n, std::vector<Predicate>& out) {
  if (!n) return;
  if (n->kind == Kind::Pred) out.push_back(*n->pred);
  if (n->left) collect_predicates(n->left.get(), out);
  if (n->right) collect_predicates(n->right.get(), out);
}

// Pushes negation inward. `neg` tracks an outstanding negation.
std::shared_ptr<const Node> pnf_node(const Node* n, bool neg) {
  switch (n->kind) {
    case Kind::True:
      if (!neg) return make_node(Kind::True, nullptr, nullptr, 0, 0);
      {
        // Negated truth: a constant predicate pinned far below zero so the
        // value plays the role of -infinity under smoothing.
        auto node = std::make_shared<Node>();
        node->kind = Kind::Pred;
        node->pred = std::make_shared<Predicate>(
            Predicate::affine(Eigen::VectorXd(), -1e9, "__false"));
        return node;
      }
    case Kind::Pred: {
      auto node = std::make_shared<Node>();
      node->kind = Kind::Pred;
      node->pred = neg ? std::make_shared<Predicate>(n->pred->negate()) : n->pred;
      return node;
    }
    case Kind::Not:
      return pnf_node(n->left.get(), !neg);
    case Kind::And:
      return make_node(neg ? Kind::Or : Kind::And, pnf_node(n->left.get(), neg),
                       pnf_node(n->right.get(), neg), 0, 0);
    case Kind::Or:
      return make_node(neg ? Kind::And : Kind::Or, pnf_node(n->left.get(), neg),
                       pnf_node(n->right.get(), neg), 0, 0);
    case Kind::Until:
      if (neg) {
        throw UnsupportedPnfError(
            "negation above Until has no positive normal form in this grammar");
      }
      return make_node(Kind::Until, pnf_node(n->left.get(), false),
                       pnf_node(n->right.get(), false), n->lo, n->hi);
    case Kind::Eventually:
      return make_node(neg ? Kind::Always : Kind::Eventually,
                       pnf_node(n->left.get(), neg), nullptr, n->lo, n->hi);
    case Kind::Always:
      return make_node(neg ? Kind::Eventually : Kind::Always,
                       pnf_node(n->left.get(), neg), nullptr, n->lo, n->hi);
  }
  return nullptr;
}

// Printing with minimal parentheses. Precedence, loosest to tightest:
// | (1), & (2), U (3), unary !/F/G (4).
int precedence(Kind k) {
  switch (k) {
    case Kind::Or:
      return 1;
    case Kind::And:
      return 2;
    case Kind::Until:
      return 3;
    default:
      return 4;
  }
}

std::string print_predicate(const Predicate& p) {
  std::ostringstream os;
  os.precision(17);
  if (!p.name().empty()) {
    if (p.negated()) os << "!";
    os << p.name();
    return os.str();
  }
  if (p.negated()) os << "!";
  switch (p.kind()) {
    case Predicate::Kind::Affine: {
      os << "affine(";
      for (int i = 0; i < p.affine_a().size(); ++i) {
        if (i) os << ", ";
        os << p.affine_a()[i];
      }
      os << "; " << p.affine_b() << ")";
      break;
    }
    case Predicate::Kind::NormBall: {
      os << "ball(" << p.ball_c() << "; ";
      bool first = true;
      for (int i = 0; i < p.ball_p().rows(); ++i) {
        for (int j = 0; j < p.ball_p().cols(); ++j) {
          if (!first) os << ", ";
          first = false;
          os << p.ball_p()(i, j);
        }
      }
      os << "; ";
      for (int i = 0; i < p.ball_q().size(); ++i) {
        if (i) os << ", ";
        os << p.ball_q()[i];
      }
      os << ")";
      break;
    }
    case Predicate::Kind::Custom:
      os << p.name();  // customs are always registered by name
      break;
  }
  return os.str();
}

std::string print_node(const Node* n, int parent_prec) {
  std::string s;
  const int prec = precedence(n->kind);
  switch (n->kind) {
    case Kind::True:
      s = "true";
      break;
    case Kind::Pred:
      s = print_predicate(*n->pred);
      break;
    case Kind::Not:
      s = "!" + print_node(n->left.get(), prec);
      break;
    case Kind::And:
      s = print_node(n->left.get(), prec) + " & " + print_node(n->right.get(), prec + 1);
      break;
    case Kind::Or:
      s = print_node(n->left.get(), prec) + " | " + print_node(n->right.get(), prec + 1);
      break;
    case Kind::Until:
      s = print_node(n->left.get(), prec + 1) + " U[" + std::to_string(n->lo) + "," +
          std::to_string(n->hi) + "] " + print_node(n->right.get(), prec + 1);
      break;
    case Kind::Eventually:
      s = "F[" + std::to_string(n->lo) + "," + std::to_string(n->hi) + "] " +
          print_node(n->left.get(), prec);
      break;
    case Kind::Always:
      s = "G[" + std::to_string(n->lo) + "," + std::to_string(n->hi) + "] " +
          print_node(n->left.get(), prec);
      break;
  }
  if (prec < parent_prec) return "(" + s + ")";
  return s;
}

bool nodes_equal(const Node* a, const Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->lo != b->lo || a->hi != b->hi) return false;
  if (a->kind == Kind::Pred && !(*a->pred == *b->pred)) return false;
  return nodes_equal(a->left.get(), b->left.get()) &&
         nodes_equal(a->right.get(), b->right.get());
}

}  // namespace

StlFormula StlFormula::truth() {
  return StlFormula(make_node(Kind::True, nullptr, nullptr, 0, 0));
}

StlFormula StlFormula::pred(Predicate p) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pred;
  n->pred = std::make_shared<Predicate>(std::move(p));
  return StlFormula(n);
}

StlFormula StlFormula::negation(StlFormula f) {
  return StlFormula(make_node(Kind::Not, f.node_, nullptr, 0, 0));
}

StlFormula StlFormula::conj(StlFormula lhs, StlFormula rhs) {
  return StlFormula(make_node(Kind::And, lhs.node_, rhs.node_, 0, 0));
}

StlFormula StlFormula::disj(StlFormula lhs, StlFormula rhs) {
  return StlFormula(make_node(Kind::Or, lhs.node_, rhs.node_, 0, 0));
}

StlFormula StlFormula::until(int a, int b, StlFormula lhs, StlFormula rhs) {
  check_interval(a, b);
  return StlFormula(make_node(Kind::Until, lhs.node_, rhs.node_, a, b));
}

StlFormula StlFormula::eventually(int a, int b, StlFormula f) {
  check_interval(a, b);
  return StlFormula(make_node(Kind::Eventually, f.node_, nullptr, a, b));
}

StlFormula StlFormula::always(int a, int b, StlFormula f) {
  check_interval(a, b);
  return StlFormula(make_node(Kind::Always, f.node_, nullptr, a, b));
}

StlFormula::Kind StlFormula::kind() const { return node_->kind; }

const Predicate& StlFormula::predicate() const {
  if (node_->kind != Kind::Pred) throw InvalidArgumentError("not a predicate node");
  return *node_->pred;
}

StlFormula StlFormula::left() const { return StlFormula(node_->left); }

StlFormula StlFormula::right() const { return StlFormula(node_->right); }

int StlFormula::interval_lo() const { return node_->lo; }
int StlFormula::interval_hi() const { return node_->hi; }

int StlFormula::horizon() const { return horizon_of(node_.get()); }

bool StlFormula::is_pnf() const { return pnf_of(node_.get()); }

StlFormula StlFormula::to_pnf() const { return StlFormula(pnf_node(node_.get(), false)); }

std::string StlFormula::to_string() const { return print_node(node_.get(), 0); }

std::vector<Predicate> StlFormula::predicates() const {
  std::vector<Predicate> out;
  collect_predicates(node_.get(), out);
  return out;
}

double StlFormula::max_predicate_lipschitz() const {
  double l1 = 0.0;
  for (const Predicate& p : predicates()) l1 = std::max(l1, p.lipschitz());
  return l1;
}

bool StlFormula::operator==(const StlFormula& other) const {
  return nodes_equal(node_.get(), other.node_.get());
}

Trajectory::Trajectory(std::vector<Eigen::VectorXd> states) : states_(std::move(states)) {
  if (states_.empty()) throw InvalidArgumentError("trajectory must contain z_0");
  for (const auto& z : states_) {
    if (z.size() != states_[0].size()) {
      throw InvalidArgumentError("trajectory states must share one dimension");
    }
  }
}

}  // namespace stldro::stl
