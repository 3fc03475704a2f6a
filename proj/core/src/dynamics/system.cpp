#include "stldro/dynamics/system.hpp"

namespace stldro::dyn {

int LinearMultiAgentSystem::augmented_dim() const {
  int nz = state_dim();
  for (const auto& ag : agents) nz += static_cast<int>(ag.d.rows());
  return nz;
}

void LinearMultiAgentSystem::validate() const {
  const int nx = state_dim();
  if (a.cols() != nx) throw InvalidArgumentError("A must be square");
  if (c.rows() != nx) throw InvalidArgumentError("C must have n_x rows");
  if (x0.size() != nx) throw InvalidArgumentError("x0 must have n_x entries");
  if (disturbance.dim() != nx) {
    throw InvalidArgumentError("disturbance support must live in R^{n_x}");
  }
  if (horizon < 1) throw InvalidArgumentError("horizon N must be >= 1");
  const int n = static_cast<int>(agents.size());
  for (int i = 0; i < n; ++i) {
    const auto& ag = agents[static_cast<std::size_t>(i)];
    const int ni = static_cast<int>(ag.d.rows());
    if (ag.d.cols() != nx) throw InvalidArgumentError("D_i must have n_x columns");
    if (ag.b.rows() != nx || ag.b.cols() != ni) {
      throw InvalidArgumentError("B_i must be n_x x n_i");
    }
    if (ag.y0.size() != ni) throw InvalidArgumentError("y0^i must have n_i entries");
    if (ag.tube.dim() != ni) throw InvalidArgumentError("tube T_i must live in R^{n_i}");
    if (static_cast<int>(ag.e_row.size()) != n) {
      throw InvalidArgumentError("agent i must carry E_{i,j} for every j");
    }
    for (int j = 0; j < n; ++j) {
      const int nj = static_cast<int>(agents[static_cast<std::size_t>(j)].d.rows());
      const auto& e = ag.e_row[static_cast<std::size_t>(j)];
      if (e.rows() != ni || e.cols() != nj) {
        throw InvalidArgumentError("E_{i,j} must be n_i x n_j");
      }
    }
  }
}

AugmentedSystem build_augmented(const LinearMultiAgentSystem& sys) {
  sys.validate();
  const int nx = sys.state_dim();
  const int nz = sys.augmented_dim();

  AugmentedSystem aug;
  aug.nx = nx;
  aug.nu = sys.input_dim();
  aug.nz = nz;
  aug.horizon = sys.horizon;
  aug.disturbance = sys.disturbance;

  aug.a_bar = Eigen::MatrixXd::Zero(nz, nz);
  aug.a_bar.topLeftCorner(nx, nx) = sys.a;

  int offset = nx;
  for (const auto& ag : sys.agents) {
    const int ni = static_cast<int>(ag.d.rows());
    aug.agent_dims.push_back(ni);
    aug.agent_offsets.push_back(offset);
    aug.tubes.push_back(ag.tube);
    offset += ni;
  }

  const int n = static_cast<int>(sys.agents.size());
  for (int i = 0; i < n; ++i) {
    const auto& ag = sys.agents[static_cast<std::size_t>(i)];
    const int ri = aug.agent_offsets[static_cast<std::size_t>(i)];
    const int ni = aug.agent_dims[static_cast<std::size_t>(i)];
    aug.a_bar.block(0, ri, nx, ni) = ag.b;
    aug.a_bar.block(ri, 0, ni, nx) = ag.d;
    for (int j = 0; j < n; ++j) {
      const int cj = aug.agent_offsets[static_cast<std::size_t>(j)];
      const int nj = aug.agent_dims[static_cast<std::size_t>(j)];
      aug.a_bar.block(ri, cj, ni, nj) = ag.e_row[static_cast<std::size_t>(j)];
    }
  }

  aug.input_map = Eigen::MatrixXd::Zero(nz, aug.nu);
  aug.input_map.topRows(nx) = sys.c;

  aug.z0 = Eigen::VectorXd::Zero(nz);
  aug.z0.head(nx) = sys.x0;
  for (int i = 0; i < n; ++i) {
    aug.z0.segment(aug.agent_offsets[static_cast<std::size_t>(i)],
                   aug.agent_dims[static_cast<std::size_t>(i)]) =
        sys.agents[static_cast<std::size_t>(i)].y0;
  }
  return aug;
}

AugmentedBlocks extract_blocks(const AugmentedSystem& aug) {
  AugmentedBlocks out;
  out.a = aug.a_bar.topLeftCorner(aug.nx, aug.nx);
  const int n = static_cast<int>(aug.agent_dims.size());
  out.e.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int ri = aug.agent_offsets[static_cast<std::size_t>(i)];
    const int ni = aug.agent_dims[static_cast<std::size_t>(i)];
    out.b.push_back(aug.a_bar.block(0, ri, aug.nx, ni));
    out.d.push_back(aug.a_bar.block(ri, 0, ni, aug.nx));
    for (int j = 0; j < n; ++j) {
      const int cj = aug.agent_offsets[static_cast<std::size_t>(j)];
      const int nj = aug.agent_dims[static_cast<std::size_t>(j)];
      out.e[static_cast<std::size_t>(i)].push_back(aug.a_bar.block(ri, cj, ni, nj));
    }
  }
  return out;
}

}  // namespace stldro::dyn
