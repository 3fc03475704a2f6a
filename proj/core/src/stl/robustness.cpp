#include "stldro/stl/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <tuple>

namespace stldro::stl {

namespace {

using Node = StlFormula::Node;
using Kind = StlFormula::Kind;

void check_horizon(const StlFormula& f, const Trajectory& xi, int k) {
  if (k < 0 || k + f.horizon() > xi.horizon()) {
    throw HorizonError("robustness at k=" + std::to_string(k) + " needs states up to " +
                       std::to_string(k + f.horizon()) + " but trajectory ends at " +
                       std::to_string(xi.horizon()));
  }
}

// ---------------------------------------------------------------- exact

class ExactEvaluator {
 public:
  ExactEvaluator(const Trajectory& xi, double top) : xi_(xi), top_(top) {}

  double eval(const Node* n, int k) {
    const auto key = std::make_pair(n, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double v = 0.0;
    switch (n->kind) {
      case Kind::True:
        v = top_;
        break;
      case Kind::Pred:
        v = n->pred->value(xi_.state(k));
        break;
      case Kind::Not:
        v = -eval(n->left.get(), k);
        break;
      case Kind::And:
        v = std::min(eval(n->left.get(), k), eval(n->right.get(), k));
        break;
      case Kind::Or:
        v = std::max(eval(n->left.get(), k), eval(n->right.get(), k));
        break;
      case Kind::Until: {
        v = -top_;
        double prefix = top_;
        for (int kp = 0; kp <= n->hi; ++kp) {
          prefix = std::min(prefix, eval(n->left.get(), k + kp));
          if (kp >= n->lo) {
            v = std::max(v, std::min(eval(n->right.get(), k + kp), prefix));
          }
        }
        break;
      }
      case Kind::Eventually: {
        v = -top_;
        for (int kp = n->lo; kp <= n->hi; ++kp) {
          v = std::max(v, eval(n->left.get(), k + kp));
        }
        break;
      }
      case Kind::Always: {
        v = top_;
        for (int kp = n->lo; kp <= n->hi; ++kp) {
          v = std::min(v, eval(n->left.get(), k + kp));
        }
        break;
      }
    }
    memo_[key] = v;
    return v;
  }

 private:
  const Trajectory& xi_;
  double top_;
  std::map<std::pair<const Node*, int>, double> memo_;
};

class BooleanEvaluator {
 public:
  explicit BooleanEvaluator(const Trajectory& xi) : xi_(xi) {}

  bool eval(const Node* n, int k) {
    const auto key = std::make_pair(n, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool v = false;
    switch (n->kind) {
      case Kind::True:
        v = true;
        break;
      case Kind::Pred:
        v = n->pred->value(xi_.state(k)) >= 0.0;
        break;
      case Kind::Not:
        v = !eval(n->left.get(), k);
        break;
      case Kind::And:
        v = eval(n->left.get(), k) && eval(n->right.get(), k);
        break;
      case Kind::Or:
        v = eval(n->left.get(), k) || eval(n->right.get(), k);
        break;
      case Kind::Until: {
        v = false;
        bool prefix = true;
        for (int kp = 0; kp <= n->hi && !v; ++kp) {
          prefix = prefix && eval(n->left.get(), k + kp);
          if (kp >= n->lo) v = eval(n->right.get(), k + kp) && prefix;
        }
        break;
      }
      case Kind::Eventually: {
        v = false;
        for (int kp = n->lo; kp <= n->hi && !v; ++kp) v = eval(n->left.get(), k + kp);
        break;
      }
      case Kind::Always: {
        v = true;
        for (int kp = n->lo; kp <= n->hi && v; ++kp) v = eval(n->left.get(), k + kp);
        break;
      }
    }
    memo_[key] = v;
    return v;
  }

 private:
  const Trajectory& xi_;
  std::map<std::pair<const Node*, int>, bool> memo_;
};

// ---------------------------------------------------------------- smooth

void require_pnf(const StlFormula& f) {
  if (!f.is_pnf()) {
    throw NonPnfError("smooth robustness requires positive normal form (call to_pnf)");
  }
}

void require_sharpness(double c) {
  if (!(c > 0.0)) throw InvalidArgumentError("smoothing sharpness must be > 0");
}

// Flattened occurrence tree with dense (node, time) tables; this is the hot
// kernel of every inner optimization, so no node-keyed maps here. Preorder
// ids make ascending id order a valid topological order for the reverse
// sweep (parents strictly precede their operands).
struct FlatNode {
  Kind kind;
  const Predicate* pred = nullptr;
  int left = -1;
  int right = -1;
  int lo = 0;
  int hi = 0;
  int branch_offset = -1;  // Until only: block in the branch tables
};

class SmoothEvaluator {
 public:
  SmoothEvaluator(const Trajectory& xi, double c, double top)
      : xi_(xi), c_(c), top_(top), n_times_(xi.length()) {}

  double eval(const Node* root, int k) {
    build(root);
    return value(0, k);
  }

  std::vector<Eigen::VectorXd> backward(const Node* root, int k) {
    build(root);
    value(0, k);
    adj_.assign(value_.size(), 0.0);
    branch_adj_.assign(branch_value_.size(), 0.0);
    adj_[idx(0, k)] = 1.0;

    std::vector<Eigen::VectorXd> grad(static_cast<std::size_t>(n_times_),
                                      Eigen::VectorXd::Zero(xi_.state_dim()));
    std::vector<double> vals;
    std::vector<double> w;
    for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) {
      const FlatNode& n = nodes_[static_cast<std::size_t>(id)];
      for (int t = 0; t < n_times_; ++t) {
        if (!have_[idx(id, t)]) continue;
        const double a = adj_[idx(id, t)];
        if (a == 0.0) continue;
        switch (n.kind) {
          case Kind::True:
            break;
          case Kind::Pred:
            grad[static_cast<std::size_t>(t)] += a * n.pred->gradient(xi_.state(t));
            break;
          case Kind::Not:
            grad[static_cast<std::size_t>(t)] -=
                a * nodes_[static_cast<std::size_t>(n.left)].pred->gradient(xi_.state(t));
            break;
          case Kind::And:
          case Kind::Or: {
            vals = {value_[idx(n.left, t)], value_[idx(n.right, t)]};
            w.resize(2);
            if (n.kind == Kind::And) {
              min_weights(vals, w);
            } else {
              max_weights(vals, value_[idx(id, t)], w);
            }
            adj_[idx(n.left, t)] += a * w[0];
            adj_[idx(n.right, t)] += a * w[1];
            break;
          }
          case Kind::Eventually:
          case Kind::Always: {
            const int width = n.hi - n.lo + 1;
            vals.resize(static_cast<std::size_t>(width));
            for (int kp = 0; kp < width; ++kp) {
              vals[static_cast<std::size_t>(kp)] = value_[idx(n.left, t + n.lo + kp)];
            }
            w.resize(static_cast<std::size_t>(width));
            if (n.kind == Kind::Always) {
              min_weights(vals, w);
            } else {
              max_weights(vals, value_[idx(id, t)], w);
            }
            for (int kp = 0; kp < width; ++kp) {
              adj_[idx(n.left, t + n.lo + kp)] += a * w[static_cast<std::size_t>(kp)];
            }
            break;
          }
          case Kind::Until: {
            const int width = n.hi - n.lo + 1;
            vals.resize(static_cast<std::size_t>(width));
            for (int kp = 0; kp < width; ++kp) {
              vals[static_cast<std::size_t>(kp)] = branch_value_[bidx(n, t, kp)];
            }
            w.resize(static_cast<std::size_t>(width));
            max_weights(vals, value_[idx(id, t)], w);
            for (int kp = 0; kp < width; ++kp) {
              branch_adj_[bidx(n, t, kp)] += a * w[static_cast<std::size_t>(kp)];
            }
            break;
          }
        }
      }
      // Until branch terms feed strictly deeper nodes, so flushing them here
      // keeps the sweep topological.
      if (n.kind == Kind::Until) {
        for (int t = 0; t < n_times_; ++t) {
          if (!have_[idx(id, t)]) continue;
          for (int kp = n.lo; kp <= n.hi; ++kp) {
            const double ba = branch_adj_[bidx(n, t, kp - n.lo)];
            if (ba == 0.0) continue;
            vals.resize(static_cast<std::size_t>(kp) + 2);
            vals[0] = value_[idx(n.right, t + kp)];
            for (int kpp = 0; kpp <= kp; ++kpp) {
              vals[static_cast<std::size_t>(kpp) + 1] = value_[idx(n.left, t + kpp)];
            }
            w.resize(vals.size());
            min_weights(vals, w);
            adj_[idx(n.right, t + kp)] += ba * w[0];
            for (int kpp = 0; kpp <= kp; ++kpp) {
              adj_[idx(n.left, t + kpp)] += ba * w[static_cast<std::size_t>(kpp) + 1];
            }
          }
        }
      }
    }
    return grad;
  }

 private:
  void build(const Node* root) {
    if (!nodes_.empty()) return;
    append(root);
    value_.assign(nodes_.size() * static_cast<std::size_t>(n_times_), 0.0);
    have_.assign(value_.size(), 0);
    branch_value_.assign(static_cast<std::size_t>(branch_total_) *
                             static_cast<std::size_t>(n_times_),
                         0.0);
  }

  int append(const Node* n) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    FlatNode& fn = nodes_.back();
    fn.kind = n->kind;
    fn.lo = n->lo;
    fn.hi = n->hi;
    if (n->kind == Kind::Pred) fn.pred = n->pred.get();
    if (n->kind == Kind::Until) {
      fn.branch_offset = branch_total_;
      branch_total_ += n->hi - n->lo + 1;
    }
    // children appended after the parent: occurrence ids, not pointers, so
    // shared subtrees are expanded
    if (n->left) {
      const int left = append(n->left.get());
      nodes_[static_cast<std::size_t>(id)].left = left;
    }
    if (n->right) {
      const int right = append(n->right.get());
      nodes_[static_cast<std::size_t>(id)].right = right;
    }
    return id;
  }

  std::size_t idx(int id, int t) const {
    return static_cast<std::size_t>(id) * static_cast<std::size_t>(n_times_) +
           static_cast<std::size_t>(t);
  }

  std::size_t bidx(const FlatNode& n, int t, int branch) const {
    return (static_cast<std::size_t>(n.branch_offset) + static_cast<std::size_t>(branch)) *
               static_cast<std::size_t>(n_times_) +
           static_cast<std::size_t>(t);
  }

  double value(int id, int t) {
    const std::size_t at = idx(id, t);
    if (have_[at]) return value_[at];
    const FlatNode& n = nodes_[static_cast<std::size_t>(id)];
    double v = 0.0;
    std::vector<double> vals;
    switch (n.kind) {
      case Kind::True:
        v = top_;
        break;
      case Kind::Pred:
        v = n.pred->value(xi_.state(t));
        break;
      case Kind::Not:
        // PNF: negation only above a predicate
        v = -nodes_[static_cast<std::size_t>(n.left)].pred->value(xi_.state(t));
        break;
      case Kind::And:
        vals = {value(n.left, t), value(n.right, t)};
        v = smooth_min(vals, c_);
        break;
      case Kind::Or:
        vals = {value(n.left, t), value(n.right, t)};
        v = smooth_max(vals, c_);
        break;
      case Kind::Eventually:
      case Kind::Always: {
        for (int kp = n.lo; kp <= n.hi; ++kp) vals.push_back(value(n.left, t + kp));
        v = n.kind == Kind::Always ? smooth_min(vals, c_) : smooth_max(vals, c_);
        break;
      }
      case Kind::Until: {
        std::vector<double> branches;
        std::vector<double> inner;
        for (int kp = n.lo; kp <= n.hi; ++kp) {
          inner.clear();
          inner.push_back(value(n.right, t + kp));
          for (int kpp = 0; kpp <= kp; ++kpp) inner.push_back(value(n.left, t + kpp));
          const double bv = smooth_min(inner, c_);
          branch_value_[bidx(n, t, kp - n.lo)] = bv;
          branches.push_back(bv);
        }
        v = smooth_max(branches, c_);
        break;
      }
    }
    value_[at] = v;
    have_[at] = 1;
    return v;
  }

  void min_weights(std::span<const double> v, std::span<double> w) const {
    const double m = *std::min_element(v.begin(), v.end());
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      w[i] = std::exp(-c_ * (v[i] - m));
      total += w[i];
    }
    for (auto& x : w) x /= total;
  }

  void max_weights(std::span<const double> v, double val, std::span<double> w) const {
    const double m = *std::max_element(v.begin(), v.end());
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      w[i] = std::exp(c_ * (v[i] - m));
      total += w[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      w[i] = (w[i] / total) * (1.0 + c_ * (v[i] - val));
    }
  }

  const Trajectory& xi_;
  double c_;
  double top_;
  int n_times_;
  std::vector<FlatNode> nodes_;
  int branch_total_ = 0;
  std::vector<double> value_;
  std::vector<char> have_;
  std::vector<double> branch_value_;
  std::vector<double> adj_;
  std::vector<double> branch_adj_;
};

}  // namespace

double robustness(const StlFormula& f, const Trajectory& xi, int k,
                  const RobustnessOptions& opts) {
  check_horizon(f, xi, k);
  return ExactEvaluator(xi, opts.top).eval(f.node(), k);
}

bool boolean_sat(const StlFormula& f, const Trajectory& xi, int k) {
  check_horizon(f, xi, k);
  return BooleanEvaluator(xi).eval(f.node(), k);
}

double smooth_min(std::span<const double> values, double sharpness) {
  require_sharpness(sharpness);
  if (values.empty()) throw InvalidArgumentError("smooth_min of empty list");
  const double m = *std::min_element(values.begin(), values.end());
  double total = 0.0;
  for (const double v : values) total += std::exp(-sharpness * (v - m));
  return m - std::log(total) / sharpness;
}

double smooth_max(std::span<const double> values, double sharpness) {
  require_sharpness(sharpness);
  if (values.empty()) throw InvalidArgumentError("smooth_max of empty list");
  const double m = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  double acc = 0.0;
  for (const double v : values) {
    const double e = std::exp(sharpness * (v - m));
    total += e;
    acc += v * e;
  }
  return acc / total;
}

double smooth_robustness(const StlFormula& f, const Trajectory& xi, int k,
                         double sharpness, const RobustnessOptions& opts) {
  check_horizon(f, xi, k);
  require_pnf(f);
  require_sharpness(sharpness);
  return SmoothEvaluator(xi, sharpness, opts.top).eval(f.node(), k);
}

SmoothGradient smooth_robustness_gradient(const StlFormula& f, const Trajectory& xi,
                                          int k, double sharpness,
                                          const RobustnessOptions& opts) {
  check_horizon(f, xi, k);
  require_pnf(f);
  require_sharpness(sharpness);
  SmoothEvaluator ev(xi, sharpness, opts.top);
  SmoothGradient out;
  out.value = ev.eval(f.node(), k);
  out.state_gradients = ev.backward(f.node(), k);
  return out;
}

}  // namespace stldro::stl
