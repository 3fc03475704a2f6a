#include "stldro/risk/cvar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stldro/util/special.hpp"

namespace stldro::risk {

void LossSample::validate() const {
  if (values.empty()) throw InvalidArgumentError("loss sample needs M >= 1 values");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidArgumentError("loss sample tolerance must lie in (0,1)");
  }
}

LowerCvarResult lower_cvar(std::span<const double> rewards, double eps) {
  const int m = static_cast<int>(rewards.size());
  if (m < 1) throw InvalidArgumentError("lower_cvar needs at least one sample");
  if (!(eps > 0.0 && eps < 1.0 + 1e-12)) {
    throw InvalidArgumentError("lower_cvar: eps must lie in (0,1]");
  }
  const double em = eps * m;
  int j = static_cast<int>(std::ceil(em - 1e-9));
  j = std::max(1, std::min(j, m));

  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return rewards[static_cast<std::size_t>(a)] < rewards[static_cast<std::size_t>(b)];
  });

  const double eta = rewards[static_cast<std::size_t>(order[static_cast<std::size_t>(j - 1)])];
  double tail = 0.0;
  int below = 0;
  for (int i = 0; i < m; ++i) {
    const double r = rewards[static_cast<std::size_t>(i)];
    if (r < eta) {
      tail += r - eta;
      ++below;
    }
  }
  LowerCvarResult out;
  out.eta = eta;
  out.value = eta + tail / em;

  out.weights.assign(static_cast<std::size_t>(m), 0.0);
  int ties = 0;
  for (int i = 0; i < m; ++i) {
    if (rewards[static_cast<std::size_t>(i)] == eta) ++ties;
  }
  const double tie_weight = ties > 0 ? (1.0 - below / em) / ties : 0.0;
  for (int i = 0; i < m; ++i) {
    const double r = rewards[static_cast<std::size_t>(i)];
    if (r < eta) {
      out.weights[static_cast<std::size_t>(i)] = 1.0 / em;
    } else if (r == eta) {
      out.weights[static_cast<std::size_t>(i)] = tie_weight;
    }
  }
  return out;
}

CvarResult cvar_empirical(const LossSample& sample) {
  sample.validate();
  std::vector<double> negated(sample.values.size());
  for (std::size_t i = 0; i < sample.values.size(); ++i) negated[i] = -sample.values[i];
  const LowerCvarResult lower = lower_cvar(negated, sample.eps);
  return CvarResult{-lower.value, -lower.eta};
}

double var_gaussian(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgumentError("var_gaussian: eps in (0,1)");
  return util::normal_quantile(1.0 - eps);
}

double cvar_gaussian(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgumentError("cvar_gaussian: eps in (0,1)");
  return util::normal_pdf(util::normal_quantile(1.0 - eps)) / eps;
}

}  // namespace stldro::risk
