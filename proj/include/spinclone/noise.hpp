#pragma once

// Dephasing from independent white-noise z fields sum_i (b_i(t) / 2) sz_i with
// <b_i(t) b_j(t')> = gamma delta_ij delta(t - t'). Averaged, this is the
// master equation
//   d rho / dt = -i [H, rho] + (gamma / 4) sum_i (sz_i rho sz_i - rho),
// which in the configuration basis damps rho(s, s') at rate
// (gamma / 2) * hamming(s, s').

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spinclone/dynamics.hpp"
#include "spinclone/errors.hpp"
#include "spinclone/hamiltonian.hpp"
#include "spinclone/parallel.hpp"
#include "spinclone/sector.hpp"
#include "spinclone/topology.hpp"

namespace spinclone {

enum class NoiseMode { master_equation, trajectories };

struct NoiseSpec {
  double gamma = 0.0;  // in units of J
  NoiseMode mode = NoiseMode::master_equation;
  double dt = 1e-2;  // trajectory step (Jt)
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  void validate() const {
    if (!(gamma >= 0.0)) throw std::invalid_argument("NoiseSpec: gamma must be non-negative");
    if (!(dt > 0.0)) throw std::invalid_argument("NoiseSpec: dt must be positive");
    if (n_traj == 0) throw std::invalid_argument("NoiseSpec: need at least one trajectory");
  }
};

struct MixedState {
  BasisPtr basis;
  Eigen::MatrixXcd rho;

  double trace() const { return rho.trace().real(); }
  double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
    return solver.eigenvalues()[0];
  }
};

inline MixedState to_mixed(const SectorState& psi) {
  return {psi.basis, psi.amplitudes * psi.amplitudes.adjoint()};
}

inline QubitDensity reduce_to_site(const MixedState& state, std::size_t site) {
  const auto& basis = *state.basis;
  if (site >= basis.n_sites()) throw std::invalid_argument("reduce_to_site: site out of range");
  const Config bit = Config{1} << site;
  cplx p0 = 0.0, p1 = 0.0, coherence = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Config c = basis.state(k);
    if (c & bit) {
      p1 += state.rho(kk, kk);
    } else {
      p0 += state.rho(kk, kk);
      const std::size_t partner = basis.index_of(c | bit);
      if (partner != SectorBasis::npos) coherence += state.rho(kk, static_cast<Eigen::Index>(partner));
    }
  }
  QubitDensity out;
  out.matrix << p0.real(), coherence, std::conj(coherence), p1.real();
  return out;
}

inline double trace_distance(const MixedState& a, const MixedState& b) {
  if (!same_basis(a.basis, b.basis)) throw std::invalid_argument("trace_distance: basis mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.rho - b.rho);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

inline Eigen::MatrixXd hamming_matrix(const SectorBasis& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      h(r, c) = static_cast<double>(std::popcount(basis.state(static_cast<std::size_t>(r)) ^
                                                  basis.state(static_cast<std::size_t>(c))));
    }
  }
  return h;
}

struct LindbladOptions {
  double dt = 1e-3;  // Jdt
  double trace_tolerance = 1e-8;
  std::size_t max_halvings = 6;
};

/// Integrates the dephasing master equation for time t with RK4 in the
/// interaction picture of the block Hamiltonian (exact when gamma = 0).
/// The step is halved until the trace drift is within tolerance.
inline MixedState lindblad_evolve(const MixedState& rho0, const HamiltonianBlock& block, double gamma, double t,
                                  const LindbladOptions& options = {}) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("lindblad_evolve: gamma must be non-negative");
  if (!(t >= 0.0)) throw std::invalid_argument("lindblad_evolve: negative time");
  if (!same_basis(rho0.basis, block.basis)) throw std::invalid_argument("lindblad_evolve: basis mismatch");
  const SpectralDecomposition spec = spectral(block);
  const Eigen::MatrixXcd v = spec.eigenvectors.cast<cplx>();
  const Eigen::MatrixXcd vt = v.adjoint();
  const Eigen::VectorXd& energy = spec.eigenvalues;
  const Eigen::MatrixXd damping = 0.5 * gamma * hamming_matrix(*block.basis);
  const Eigen::Index dim = energy.size();

  // e^{i E s} as a column, so e^{iEs} X e^{-iEs} = phase.asDiagonal() * X * phase.conj().asDiagonal().
  auto phases = [&](double s) {
    Eigen::VectorXcd p(dim);
    for (Eigen::Index k = 0; k < dim; ++k) p[k] = std::polar(1.0, energy[k] * s);
    return p;
  };
  auto rhs = [&](const Eigen::MatrixXcd& rho_i, double s) -> Eigen::MatrixXcd {
    const Eigen::VectorXcd p = phases(s);
    const Eigen::MatrixXcd eig = p.conjugate().asDiagonal() * rho_i * p.asDiagonal();
    Eigen::MatrixXcd lab = v * eig * vt;
    lab = -(damping.cast<cplx>().cwiseProduct(lab));
    return p.asDiagonal() * (vt * lab * v) * p.conjugate().asDiagonal();
  };

  const Eigen::MatrixXcd start = vt * rho0.rho * v;  // interaction picture coincides at s = 0
  const double initial_trace = rho0.trace();
  const double max_rate = dim > 0 ? damping.maxCoeff() : 0.0;
  double step = options.dt;
  if (max_rate > 0.0) step = std::min(step, 1.0 / max_rate);

  for (std::size_t attempt = 0; attempt <= options.max_halvings; ++attempt, step *= 0.5) {
    Eigen::MatrixXcd rho_i = start;
    if (gamma > 0.0 && t > 0.0) {
      const auto n_steps = static_cast<std::size_t>(std::ceil(t / step));
      const double h = t / static_cast<double>(n_steps);
      for (std::size_t n = 0; n < n_steps; ++n) {
        const double s = h * static_cast<double>(n);
        const Eigen::MatrixXcd k1 = rhs(rho_i, s);
        const Eigen::MatrixXcd k2 = rhs(rho_i + 0.5 * h * k1, s + 0.5 * h);
        const Eigen::MatrixXcd k3 = rhs(rho_i + 0.5 * h * k2, s + 0.5 * h);
        const Eigen::MatrixXcd k4 = rhs(rho_i + h * k3, s + h);
        rho_i += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    const Eigen::VectorXcd p = phases(t);
    Eigen::MatrixXcd rho = v * (p.conjugate().asDiagonal() * rho_i * p.asDiagonal()) * vt;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    if (std::abs(rho.trace().real() - initial_trace) <= options.trace_tolerance && rho.allFinite()) {
      return {rho0.basis, std::move(rho)};
    }
  }
  throw NumericalBreakdown("lindblad_evolve: trace drift above tolerance after step halving");
}

/// Final states of independent noise trajectories: exact unitary steps of
/// length dt alternating with per-site random z phases of variance gamma dt.
inline std::vector<Eigen::VectorXcd> stochastic_trajectories(const SectorState& psi0, const HamiltonianBlock& block,
                                                             double gamma, double t, double dt, std::size_t n_traj,
                                                             std::uint64_t seed, unsigned threads = 0) {
  NoiseSpec{gamma, NoiseMode::trajectories, dt, n_traj, seed, threads}.validate();
  if (!same_basis(psi0.basis, block.basis)) throw std::invalid_argument("stochastic_evolve: basis mismatch");
  const auto& basis = *block.basis;
  const SpectralDecomposition spec = spectral(block);
  const std::size_t n_steps = t > 0.0 ? static_cast<std::size_t>(std::max(1.0, std::round(t / dt))) : 0;
  const double h = n_steps > 0 ? t / static_cast<double>(n_steps) : 0.0;
  Eigen::VectorXcd phase(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < phase.size(); ++k) phase[k] = std::polar(1.0, -spec.eigenvalues[k] * h);
  const Eigen::MatrixXcd v = spec.eigenvectors.cast<cplx>();
  const Eigen::MatrixXcd step = v * phase.asDiagonal() * v.adjoint();
  const std::size_t n = basis.n_sites();
  const double kick_sigma = std::sqrt(gamma * h);

  std::vector<Eigen::VectorXcd> finals(n_traj);
  parallel_for(n_traj, threads, [&](std::size_t traj) {
    std::mt19937_64 rng(mix_seed(seed, traj));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXcd psi = psi0.amplitudes;
    std::vector<double> kicks(n);
    for (std::size_t s = 0; s < n_steps; ++s) {
      psi = step * psi;
      if (gamma == 0.0) continue;
      for (double& k : kicks) k = kick_sigma * normal(rng);
      for (std::size_t idx = 0; idx < basis.size(); ++idx) {
        double angle = 0.0;
        for (std::size_t site = 0; site < n; ++site) angle -= 0.5 * kicks[site] * sz(basis.state(idx), site);
        psi[static_cast<Eigen::Index>(idx)] *= std::polar(1.0, angle);
      }
    }
    finals[traj] = std::move(psi);
  });
  return finals;
}

/// Ensemble average of trajectory outer products, summed in trajectory order
/// with compensation on every real and imaginary component.
inline MixedState average_trajectories(const BasisPtr& basis, const std::vector<Eigen::VectorXcd>& finals) {
  const auto dim = static_cast<Eigen::Index>(basis->size());
  std::vector<CompensatedSum> re(static_cast<std::size_t>(dim * dim)), im(re.size());
  for (const auto& psi : finals) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        const cplx x = psi[r] * std::conj(psi[c]);
        re[static_cast<std::size_t>(r * dim + c)].add(x.real());
        im[static_cast<std::size_t>(r * dim + c)].add(x.imag());
      }
    }
  }
  Eigen::MatrixXcd rho(dim, dim);
  const double inv = 1.0 / static_cast<double>(finals.size());
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const auto k = static_cast<std::size_t>(r * dim + c);
      rho(r, c) = cplx(re[k].value(), im[k].value()) * inv;
    }
  }
  return {basis, rho};
}

inline MixedState stochastic_evolve(const SectorState& psi0, const HamiltonianBlock& block, double gamma, double t,
                                    double dt, std::size_t n_traj, std::uint64_t seed, unsigned threads = 0) {
  return average_trajectories(block.basis,
                              stochastic_trajectories(psi0, block, gamma, t, dt, n_traj, seed, threads));
}

/// Mean clone fidelity of the network protocol under dephasing of strength gamma.
inline double noisy_network_fidelity(const SpinNetwork& net, double lambda, double b, double theta, double gamma,
                                     double t, const NoiseSpec& noise = {}) {
  const SpinNetwork configured = net.with_anisotropy(lambda).with_field(b);
  const SectorState input = prepare_input(configured, theta, 0.0);
  const HamiltonianBlock block = build_block(configured, input.basis);
  MixedState out;
  if (noise.mode == NoiseMode::master_equation) {
    out = lindblad_evolve(to_mixed(input), block, gamma, t);
  } else {
    out = stochastic_evolve(input, block, gamma, t, noise.dt, noise.n_traj, noise.seed, noise.threads);
  }
  double sum = 0.0;
  for (std::size_t site : configured.output_sites()) sum += clone_fidelity(reduce_to_site(out, site), theta, 0.0);
  return sum / static_cast<double>(configured.output_sites().size());
}

// ---------------------------------------------------------------------------
// Gate-based baseline.

struct XyPulse {
  std::size_t i = 0;
  std::size_t j = 0;
  double duration = 0.0;  // Jt with unit coupling
};
struct ZRotation {
  std::size_t site = 0;
  double angle = 0.0;  // exp(-i angle sz / 2)
};
struct XRotation {
  std::size_t site = 0;
  double angle = 0.0;  // exp(-i angle sx / 2)
};

/// Rotations are instantaneous and noiseless; only XY pulses take time.
using GatePulse = std::variant<XyPulse, ZRotation, XRotation>;

struct Cnot {
  std::size_t control = 0;
  std::size_t target = 0;
};
struct ControlledRy {
  std::size_t control = 0;
  std::size_t target = 0;
  double angle = 0.0;  // exp(-i angle sy / 2) on the target when the control is |1>
};
using LogicalGate = std::variant<Cnot, ControlledRy>;

// XY pulse of Jt = pi/2 is exp(-i pi/8 (xx + yy)), a square-root-of-iSWAP.
inline constexpr double kHalfSwapDuration = M_PI / 2;

namespace detail {

inline void hadamard(std::vector<GatePulse>& out, std::size_t q) {
  out.push_back(ZRotation{q, M_PI / 2});
  out.push_back(XRotation{q, M_PI / 2});
  out.push_back(ZRotation{q, M_PI / 2});
}

inline void ry(std::vector<GatePulse>& out, std::size_t q, double angle) {
  out.push_back(ZRotation{q, -M_PI / 2});
  out.push_back(XRotation{q, angle});
  out.push_back(ZRotation{q, M_PI / 2});
}

// CNOT = H_t CZ H_t, CZ ~ Rz_c(-pi/2) Rz_t(-pi/2) exp(-i pi/4 zz),
// exp(-i pi/4 zz) = (H H) exp(-i pi/4 xx) (H H), and
// exp(-i pi/4 xx) = X_c U X_c U for the half-swap pulse U.
inline void cnot(std::vector<GatePulse>& out, std::size_t c, std::size_t t) {
  hadamard(out, t);
  hadamard(out, c);
  hadamard(out, t);
  out.push_back(XyPulse{c, t, kHalfSwapDuration});
  out.push_back(XRotation{c, M_PI});
  out.push_back(XyPulse{c, t, kHalfSwapDuration});
  out.push_back(XRotation{c, M_PI});
  hadamard(out, c);
  hadamard(out, t);
  out.push_back(ZRotation{c, -M_PI / 2});
  out.push_back(ZRotation{t, -M_PI / 2});
  hadamard(out, t);
}

}  // namespace detail

/// Pulse schedule (in time order) realizing a logical gate list.
inline std::vector<GatePulse> compile_to_pulses(const std::vector<LogicalGate>& gates) {
  std::vector<GatePulse> out;
  for (const auto& gate : gates) {
    if (const auto* g = std::get_if<Cnot>(&gate)) {
      detail::cnot(out, g->control, g->target);
    } else {
      const auto& r = std::get<ControlledRy>(gate);
      // CRy(a) = Ry_t(a/2) CNOT Ry_t(-a/2) CNOT
      detail::cnot(out, r.control, r.target);
      detail::ry(out, r.target, -0.5 * r.angle);
      detail::cnot(out, r.control, r.target);
      detail::ry(out, r.target, 0.5 * r.angle);
    }
  }
  return out;
}

inline double schedule_duration(const std::vector<GatePulse>& schedule) {
  double total = 0.0;
  for (const auto& p : schedule) {
    if (const auto* x = std::get_if<XyPulse>(&p)) total += x->duration;
  }
  return total;
}

/// Phase-covariant cloning circuit on qubits 0..M-1 (qubit 0 carries the input):
/// |0>|0..0> -> |0..0>, |1>|0..0> -> symmetric single excitation over all M qubits.
/// M = 2 is two CNOTs around a controlled rotation.
inline std::vector<LogicalGate> pcc_circuit(std::size_t clones) {
  if (clones == 2) return {Cnot{0, 1}, ControlledRy{1, 0, -M_PI / 2}, Cnot{0, 1}};
  if (clones == 3) {
    return {ControlledRy{0, 1, 2.0 * std::acos(std::sqrt(1.0 / 3.0))}, ControlledRy{1, 2, M_PI / 2}, Cnot{2, 1},
            Cnot{1, 0}, Cnot{2, 0}};
  }
  throw std::invalid_argument("pcc_circuit: only M = 2 and M = 3 are supported");
}

inline Eigen::Matrix2cd single_qubit_matrix(const GatePulse& pulse) {
  Eigen::Matrix2cd u;
  if (const auto* z = std::get_if<ZRotation>(&pulse)) {
    u << std::polar(1.0, -0.5 * z->angle), 0.0, 0.0, std::polar(1.0, 0.5 * z->angle);
  } else {
    const auto& x = std::get<XRotation>(pulse);
    const double c = std::cos(0.5 * x.angle), s = std::sin(0.5 * x.angle);
    u << c, cplx(0.0, -s), cplx(0.0, -s), c;
  }
  return u;
}

/// Embeds a one-qubit unitary into a basis closed under flipping `site`.
inline Eigen::MatrixXcd embed(const SectorBasis& basis, std::size_t site, const Eigen::Matrix2cd& u) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  const Config bit = Config{1} << site;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const Config c = basis.state(col);
    const int in = (c & bit) ? 1 : 0;
    for (int out = 0; out < 2; ++out) {
      const Config target = out ? (c | bit) : (c & ~bit);
      const std::size_t row = basis.index_of(target);
      if (row == SectorBasis::npos) throw std::invalid_argument("embed: basis not closed under single-site flips");
      full(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += u(out, in);
    }
  }
  return full;
}

inline double mean_clone_fidelity(const MixedState& state, std::size_t clones, double theta) {
  double sum = 0.0;
  for (std::size_t q = 0; q < clones; ++q) sum += clone_fidelity(reduce_to_site(state, q), theta, 0.0);
  return sum / static_cast<double>(clones);
}

/// Runs a pulse schedule on `n_qubits` under dephasing gamma, input qubit 0 in
/// the equatorial-family state (theta, phi = 0), others |0>.
inline MixedState run_schedule(const std::vector<GatePulse>& schedule, std::size_t n_qubits, double theta,
                               double gamma) {
  const BasisPtr basis = std::make_shared<const SectorBasis>(SectorBasis::full(n_qubits));
  const SpinNetwork blank = from_edge_list(n_qubits, {}, {0}, {});
  MixedState state = to_mixed(prepare_input(blank, theta, 0.0));
  // Re-express the input on the full basis.
  {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(basis->size()),
                                                  static_cast<Eigen::Index>(basis->size()));
    for (std::size_t r = 0; r < state.basis->size(); ++r) {
      for (std::size_t c = 0; c < state.basis->size(); ++c) {
        rho(static_cast<Eigen::Index>(basis->index_of(state.basis->state(r))),
            static_cast<Eigen::Index>(basis->index_of(state.basis->state(c)))) =
            state.rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
    state = {basis, rho};
  }
  for (const auto& pulse : schedule) {
    if (const auto* xy = std::get_if<XyPulse>(&pulse)) {
      const SpinNetwork edge = from_edge_list(n_qubits, {{xy->i, xy->j, 1.0}}, {0}, {});
      state = lindblad_evolve(state, build_block(edge, basis), gamma, xy->duration);
    } else {
      const std::size_t site = std::holds_alternative<ZRotation>(pulse) ? std::get<ZRotation>(pulse).site
                                                                        : std::get<XRotation>(pulse).site;
      const Eigen::MatrixXcd u = embed(*basis, site, single_qubit_matrix(pulse));
      state.rho = u * state.rho * u.adjoint();
    }
  }
  return state;
}

/// Mean clone fidelity of the compiled 1 -> M circuit under dephasing gamma,
/// with noise active for the whole pulse schedule.
inline double circuit_baseline(std::size_t clones, double theta, double gamma) {
  const auto schedule = compile_to_pulses(pcc_circuit(clones));
  return mean_clone_fidelity(run_schedule(schedule, clones, theta, gamma), clones, theta);
}

/// Noiseless reference: the logical gate list applied as exact unitaries to a
/// state vector, without pulse compilation.
inline double circuit_ideal_fidelity(std::size_t clones, double theta) {
  const BasisPtr basis = std::make_shared<const SectorBasis>(SectorBasis::full(clones));
  const auto dim = static_cast<Eigen::Index>(basis->size());
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  const Eigen::Vector2cd q = qubit_state(theta, 0.0);
  psi[0] = q[0];
  psi[1] = q[1];  // configuration 1 = qubit 0 excited
  for (const auto& gate : pcc_circuit(clones)) {
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      const Config c = basis->state(static_cast<std::size_t>(k));
      if (const auto* g = std::get_if<Cnot>(&gate)) {
        const Config flipped = ((c >> g->control) & 1U) ? c ^ (Config{1} << g->target) : c;
        next[static_cast<Eigen::Index>(basis->index_of(flipped))] += psi[k];
      } else {
        const auto& r = std::get<ControlledRy>(gate);
        if (!((c >> r.control) & 1U)) {
          next[k] += psi[k];
          continue;
        }
        const Config bit = Config{1} << r.target;
        const int in = (c & bit) ? 1 : 0;
        const double cs = std::cos(0.5 * r.angle), sn = std::sin(0.5 * r.angle);
        // Ry columns: |0> -> (c, s), |1> -> (-s, c)
        const double to0 = in == 0 ? cs : -sn;
        const double to1 = in == 0 ? sn : cs;
        next[static_cast<Eigen::Index>(basis->index_of(c & ~bit))] += to0 * psi[k];
        next[static_cast<Eigen::Index>(basis->index_of(c | bit))] += to1 * psi[k];
      }
    }
    psi = next;
  }
  return mean_clone_fidelity(to_mixed({basis, psi}), clones, theta);
}

}  // namespace spinclone
