#pragma once

// Anisotropic exchange Hamiltonian
//   H = 1/4 sum_edges J_ij (sx sx + sy sy + lambda sz sz) + sum_i (B_i / 2) sz_i
// assembled on a union of magnetization sectors. A configuration bit set to 1
// marks a site in |1>, which carries sz = -1; |0> carries sz = +1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinclone/errors.hpp"
#include "spinclone/sector.hpp"
#include "spinclone/topology.hpp"

namespace spinclone {

inline constexpr std::size_t kDefaultMaxSpectralDimension = 4096;

struct HamiltonianBlock {
  BasisPtr basis;
  Eigen::MatrixXd matrix;  // real symmetric in the configuration basis
  double anisotropy = 0.0;
  std::vector<double> field;
  SpinNetwork source;
};

inline double sz(Config c, std::size_t site) { return ((c >> site) & 1U) ? -1.0 : 1.0; }

inline HamiltonianBlock build_block(const SpinNetwork& net, BasisPtr basis) {
  if (basis->n_sites() != net.n_sites()) throw std::invalid_argument("build_block: basis / network size mismatch");
  const std::size_t dim = basis->size();
  HamiltonianBlock block{basis, Eigen::MatrixXd::Zero(dim, dim), net.anisotropy(), net.field(), net};
  const double lambda = net.anisotropy();
  for (std::size_t col = 0; col < dim; ++col) {
    const Config c = basis->state(col);
    double diagonal = 0.0;
    for (std::size_t s = 0; s < net.n_sites(); ++s) diagonal += 0.5 * net.field()[s] * sz(c, s);
    for (const Edge& e : net.edges()) {
      const double zi = sz(c, e.i);
      const double zj = sz(c, e.j);
      diagonal += 0.25 * lambda * e.coupling * zi * zj;
      if (zi != zj) {
        // (sx sx + sy sy) / 4 = (s+ s- + s- s+) / 2 moves the excitation across the edge.
        const Config flipped = c ^ (Config{1} << e.i) ^ (Config{1} << e.j);
        const std::size_t row = basis->index_of(flipped);
        if (row != SectorBasis::npos) block.matrix(row, col) += 0.5 * e.coupling;
      }
    }
    block.matrix(col, col) = diagonal;
  }
  return block;
}

inline HamiltonianBlock build_block(const SpinNetwork& net, const std::set<std::size_t>& weights) {
  if (weights.empty()) throw std::invalid_argument("build_block: empty weight set");
  for (std::size_t w : weights) {
    if (w > net.n_sites()) throw std::invalid_argument("build_block: weight exceeds site count");
  }
  return build_block(net, make_basis(net.n_sites(), weights));
}

inline HamiltonianBlock build_block(const SpinNetwork& net, std::initializer_list<std::size_t> weights) {
  return build_block(net, std::set<std::size_t>(weights));
}

inline double hermiticity_error(const HamiltonianBlock& block) {
  if (block.matrix.size() == 0) return 0.0;
  return (block.matrix - block.matrix.transpose()).cwiseAbs().maxCoeff();
}

/// Eigen-decomposition of a block. Every eigenvector is supported on a single
/// excitation number (recorded in `weight`), because the exchange term never
/// mixes sectors and each sector is diagonalized on its own.
struct SpectralDecomposition {
  BasisPtr basis;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal
  std::vector<std::size_t> weight;

  /// Decomposition of H + (b/2) sum_i sz_i. Exact: the uniform field is
  /// b (n/2 - w) on every weight-w eigenvector.
  SpectralDecomposition with_uniform_field_shift(double b) const {
    const double half_n = 0.5 * static_cast<double>(basis->n_sites());
    Eigen::VectorXd shifted(eigenvalues.size());
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
      shifted[k] = eigenvalues[k] + b * (half_n - static_cast<double>(weight[k]));
    }
    return sorted(basis, shifted, eigenvectors, weight);
  }

  static SpectralDecomposition sorted(BasisPtr basis, const Eigen::VectorXd& values,
                                      const Eigen::MatrixXd& vectors, const std::vector<std::size_t>& weights) {
    std::vector<Eigen::Index> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
    SpectralDecomposition out{std::move(basis), Eigen::VectorXd(values.size()),
                              Eigen::MatrixXd(vectors.rows(), vectors.cols()), std::vector<std::size_t>(order.size())};
    for (std::size_t k = 0; k < order.size(); ++k) {
      out.eigenvalues[static_cast<Eigen::Index>(k)] = values[order[k]];
      out.eigenvectors.col(static_cast<Eigen::Index>(k)) = vectors.col(order[k]);
      out.weight[k] = weights[static_cast<std::size_t>(order[k])];
    }
    return out;
  }
};

inline SpectralDecomposition spectral(const HamiltonianBlock& block,
                                      std::size_t max_dimension = kDefaultMaxSpectralDimension) {
  const auto& basis = *block.basis;
  const std::size_t dim = basis.size();
  if (dim > max_dimension) {
    throw ResourceExhausted("spectral: block dimension " + std::to_string(dim) + " exceeds " +
                            std::to_string(max_dimension));
  }
  Eigen::VectorXd values(static_cast<Eigen::Index>(dim));
  Eigen::MatrixXd vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<std::size_t> weights(dim);
  Eigen::Index next_column = 0;
  for (std::size_t w : basis.weights()) {
    std::vector<Eigen::Index> rows;
    for (std::size_t k = 0; k < dim; ++k) {
      if (SectorBasis::weight(basis.state(k)) == w) rows.push_back(static_cast<Eigen::Index>(k));
    }
    const auto sub_dim = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd sub(sub_dim, sub_dim);
    for (Eigen::Index a = 0; a < sub_dim; ++a) {
      for (Eigen::Index b = 0; b < sub_dim; ++b) sub(a, b) = block.matrix(rows[a], rows[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub);
    if (solver.info() != Eigen::Success) throw NumericalBreakdown("spectral: eigensolver failed");
    for (Eigen::Index k = 0; k < sub_dim; ++k) {
      values[next_column] = solver.eigenvalues()[k];
      for (Eigen::Index a = 0; a < sub_dim; ++a) vectors(rows[a], next_column) = solver.eigenvectors()(a, k);
      weights[static_cast<std::size_t>(next_column)] = w;
      ++next_column;
    }
  }
  return SpectralDecomposition::sorted(block.basis, values, vectors, weights);
}

/// Excitation numbers reached by N inputs each in cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
inline std::set<std::size_t> required_weights(double theta, std::size_t input_count) {
  if (!(theta >= 0.0 && theta <= M_PI)) throw std::invalid_argument("required_weights: theta outside [0, pi]");
  if (theta == 0.0) return {0};
  if (theta == M_PI) return {input_count};
  std::set<std::size_t> weights;
  for (std::size_t w = 0; w <= input_count; ++w) weights.insert(w);
  return weights;
}

}  // namespace spinclone
