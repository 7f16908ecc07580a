#pragma once

// Closed-form 1 -> M spin-star cloning results (energies in units of J, times as Jt).

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spinclone::analytic {

enum class Model { xy, heisenberg };

inline void require_clones(std::size_t m) {
  if (m < 1) throw std::invalid_argument("analytic: M must be at least 1");
}

/// Maximal clone fidelity of the Heisenberg star, attained at t_c_heis(M).
inline double heis_star_fidelity(std::size_t clones, double theta) {
  require_clones(clones);
  const double m = static_cast<double>(clones);
  return (4.0 + (3.0 + m) * (m + (m - 1.0) * std::cos(theta)) - (m - 1.0) * std::cos(2.0 * theta)) /
         (2.0 * (1.0 + m) * (1.0 + m));
}

/// Maximal clone fidelity of the XY star at t_c_xy(M) and field b_opt(M).
inline double xy_star_fidelity(std::size_t clones, double theta) {
  require_clones(clones);
  const double m = static_cast<double>(clones);
  const double root = std::sqrt(m);
  return (1.0 + root + 2.0 * m + 2.0 * (m - 1.0) * std::cos(theta) - (root - 1.0) * std::cos(2.0 * theta)) /
         (4.0 * m);
}

// Equatorial forms, derived separately; they must agree with the general ones.
inline double heis_star_equatorial(std::size_t clones) {
  require_clones(clones);
  return 0.5 + 1.0 / (static_cast<double>(clones) + 1.0);
}

inline double xy_star_equatorial(std::size_t clones) {
  require_clones(clones);
  return 0.5 + 0.5 / std::sqrt(static_cast<double>(clones));
}

inline double t_c_heis(std::size_t clones) {
  require_clones(clones);
  return 2.0 * M_PI / (static_cast<double>(clones) + 1.0);
}

inline double t_c_xy(std::size_t clones) {
  require_clones(clones);
  return M_PI / std::sqrt(static_cast<double>(clones));
}

inline double b_opt_xy(std::size_t clones) {
  require_clones(clones);
  return 0.5 * std::sqrt(static_cast<double>(clones));
}

struct StarAnalytics {
  std::size_t clones = 0;
  Model model = Model::xy;
  double t_c = 0.0;
  double b_opt = 0.0;  // zero for the Heisenberg star

  double max_fidelity(double theta) const {
    return model == Model::xy ? xy_star_fidelity(clones, theta) : heis_star_fidelity(clones, theta);
  }
};

inline StarAnalytics star_analytics(std::size_t clones, Model model) {
  if (model == Model::xy) return {clones, model, t_c_xy(clones), b_opt_xy(clones)};
  return {clones, model, t_c_heis(clones), 0.0};
}

/// One eigenpair of the XY star in the j = M/2 multiplet of the leaves.
struct StarLevel {
  double energy = 0.0;
  double m_z = 0.0;        // leaf magnetization label
  int branch = 0;          // +1 / -1 for the (|1>|j,m> +- |0>|j,m-1>) pair, 0 for extremal states
  std::size_t weight = 0;  // excitation number of the eigenvector
};

/// Closed-form j = M/2 spectrum of the XY star with field b.
inline std::vector<StarLevel> xy_star_spectrum(std::size_t clones, double b) {
  require_clones(clones);
  const double j = 0.5 * static_cast<double>(clones);
  std::vector<StarLevel> levels;
  // |1>|j,m> carries 1 + (j - m) excitations.
  for (std::size_t step = 0; step < clones; ++step) {
    const double m = j - static_cast<double>(step);
    const double hop = 0.5 * std::sqrt((j + m) * (j - m + 1.0));
    const double shift = b * (m - 0.5);
    levels.push_back({shift + hop, m, +1, step + 1});
    levels.push_back({shift - hop, m, -1, step + 1});
  }
  levels.push_back({b * (j + 0.5), j, 0, 0});
  levels.push_back({-b * (j + 0.5), -j, 0, clones + 1});
  return levels;
}

/// Optimal phase-covariant cloning fidelities quoted alongside the network
/// results. Pairs outside the printed set have no reference.
inline std::optional<double> pcc_reference(std::size_t n_in, std::size_t m_out) {
  static constexpr std::pair<std::pair<std::size_t, std::size_t>, double> table[] = {
      {{2, 3}, 0.941}, {{2, 4}, 0.933}, {{2, 5}, 0.912}, {{2, 6}, 0.908},
      {{2, 7}, 0.898}, {{3, 4}, 0.973}, {{4, 5}, 0.987},
  };
  if (n_in == 1 && m_out == 2) return 0.25 * (2.0 + std::sqrt(2.0));
  for (const auto& [key, value] : table) {
    if (key.first == n_in && key.second == m_out) return value;
  }
  return std::nullopt;
}

}  // namespace spinclone::analytic
