#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinclone/analytic.hpp"
#include "spinclone/noise.hpp"

using namespace spinclone;

namespace {

constexpr double kXyStar2 = 0.25 * (2.0 + 1.4142135623730951);

// Full-space Liouvillian of the dephasing master equation, column-stacked vec(rho).
Eigen::MatrixXcd liouvillian(const SpinNetwork& net, double gamma) {
  const std::size_t n = net.n_sites();
  const Eigen::MatrixXcd h = oracle::hamiltonian(net);
  const auto dim = h.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd l = cplx(0, -1) * (Eigen::kroneckerProduct(id, h).eval() -
                                      Eigen::kroneckerProduct(Eigen::MatrixXcd(h.transpose()), id).eval());
  for (std::size_t s = 0; s < n; ++s) {
    const Eigen::MatrixXcd z = oracle::on_site(n, s, oracle::pauli('z'));
    l += 0.25 * gamma *
         (Eigen::kroneckerProduct(Eigen::MatrixXcd(z.transpose()), z).eval() -
          Eigen::MatrixXcd::Identity(dim * dim, dim * dim));
  }
  return l;
}

Eigen::MatrixXcd oracle_lindblad(const SpinNetwork& net, const Eigen::MatrixXcd& rho0, double gamma, double t) {
  const auto dim = rho0.rows();
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), dim * dim);
  v = (t * liouvillian(net, gamma)).exp() * v;
  return Eigen::Map<Eigen::MatrixXcd>(v.data(), dim, dim);
}

MixedState full_space_input(const SpinNetwork& net, double theta) {
  const Eigen::VectorXcd psi = oracle::product_input(net, theta, 0.0);
  return {std::make_shared<const SectorBasis>(SectorBasis::full(net.n_sites())), psi * psi.adjoint()};
}

// Unitary of a pulse schedule on two qubits, built from the Pauli oracle.
Eigen::MatrixXcd schedule_unitary(const std::vector<GatePulse>& schedule, std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& pulse : schedule) {
    Eigen::MatrixXcd step;
    if (const auto* xy = std::get_if<XyPulse>(&pulse)) {
      step = oracle::propagator(oracle::hamiltonian(from_edge_list(n, {{xy->i, xy->j, 1.0}}, {0}, {})), xy->duration);
    } else if (const auto* z = std::get_if<ZRotation>(&pulse)) {
      step = (cplx(0, -0.5 * z->angle) * oracle::on_site(n, z->site, oracle::pauli('z'))).exp();
    } else {
      const auto& x = std::get<XRotation>(pulse);
      step = (cplx(0, -0.5 * x.angle) * oracle::on_site(n, x.site, oracle::pauli('x'))).exp();
    }
    u = (step * u).eval();
  }
  return u;
}

double phase_free_matrix_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::Index r, c;
  b.cwiseAbs().maxCoeff(&r, &c);
  const cplx phase = a(r, c) / b(r, c);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Lindblad, NoNoiseIsUnitary) {
  const SpinNetwork net = bipartite(2, 3).with_field(0.4);
  const SectorState psi = prepare_input(net, 1.1, 0.0);
  const HamiltonianBlock block = build_block(net, psi.basis);
  const SectorState evolved = evolve(psi, spectral(block), 3.7);
  const MixedState rho = lindblad_evolve(to_mixed(psi), block, 0.0, 3.7);
  EXPECT_LE((rho.rho - to_mixed(evolved).rho).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Lindblad, SingleQubitCoherenceDecay) {
  const SpinNetwork lone = from_edge_list(1, {}, {0}, {});
  const SectorState plus = prepare_input(lone, M_PI / 2, 0.0);
  const HamiltonianBlock block = build_block(lone, plus.basis);
  for (double gamma : {0.01, 0.3, 2.0}) {
    for (double t : {0.5, 4.0}) {
      const MixedState rho = lindblad_evolve(to_mixed(plus), block, gamma, t);
      EXPECT_NEAR(std::abs(rho.rho(0, 1)), 0.5 * std::exp(-gamma * t / 2), 1e-10);
      EXPECT_NEAR(rho.rho(0, 0).real(), 0.5, 1e-12);
    }
  }
}

TEST(Lindblad, MatchesLiouvillianOracle) {
  oracle::Gen gen(17);
  for (int trial = 0; trial < 6; ++trial) {
    const SpinNetwork net = gen.network(gen.integer(2, 3), 1);
    const double gamma = gen.uniform(0.0, 0.5);
    const double t = gen.uniform(0.5, 4.0);
    const MixedState rho0 = full_space_input(net, gen.uniform(0.2, 2.9));
    const MixedState rho = lindblad_evolve(rho0, build_block(net, rho0.basis), gamma, t);
    EXPECT_LE((rho.rho - oracle_lindblad(net, rho0.rho, gamma, t)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Lindblad, TraceAndPositivityOnLongSchedule) {
  const SpinNetwork net = bipartite(2, 3).with_field(0.2);
  const SectorState psi = prepare_input(net, M_PI / 2, 0.0);
  const HamiltonianBlock block = build_block(net, psi.basis);
  for (double gamma : {1e-3, 1e-1}) {
    const MixedState rho = lindblad_evolve(to_mixed(psi), block, gamma, 4 * M_PI);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-8);
    EXPECT_GE(rho.min_eigenvalue(), -1e-9);
    EXPECT_LE(rho.hermiticity_error(), 1e-12);
  }
}

TEST(Lindblad, Rejections) {
  const SpinNetwork net = star(2);
  const SectorState psi = prepare_input(net, M_PI / 2, 0.0);
  const HamiltonianBlock block = build_block(net, psi.basis);
  EXPECT_THROW(lindblad_evolve(to_mixed(psi), block, -1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(lindblad_evolve(to_mixed(psi), build_block(net, {1}), 0.1, 1.0), std::invalid_argument);
}

TEST(Trajectories, NoNoiseReproducesEvolve) {
  const SpinNetwork net = star(3).with_field(0.5);
  const SectorState psi = prepare_input(net, 1.0, 0.0);
  const HamiltonianBlock block = build_block(net, psi.basis);
  const SectorState exact = evolve(psi, spectral(block), 2.5);
  for (const auto& final : stochastic_trajectories(psi, block, 0.0, 2.5, 0.01, 5, 1)) {
    EXPECT_LE((final - exact.amplitudes).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Trajectories, SingleQubitDecayWithinThreeSigma) {
  const SpinNetwork lone = from_edge_list(1, {}, {0}, {});
  const SectorState plus = prepare_input(lone, M_PI / 2, 0.0);
  const HamiltonianBlock block = build_block(lone, plus.basis);
  const double gamma = 0.2, t = 3.0;
  const auto finals = stochastic_trajectories(plus, block, gamma, t, 0.01, 1000, 99);
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& psi : finals) {
    const double x = (psi[0] * std::conj(psi[1])).real();
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(finals.size());
  const double mean = sum / n;
  const double sigma = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
  EXPECT_LE(std::abs(mean - 0.5 * std::exp(-gamma * t / 2)), 3 * sigma);
}

TEST(Trajectories, AgreeWithMasterEquation) {
  const auto xy = analytic::star_analytics(2, analytic::Model::xy);
  const SpinNetwork net = star(2).with_field(xy.b_opt);
  const SectorState psi = prepare_input(net, M_PI / 2, 0.0);
  const HamiltonianBlock block = build_block(net, psi.basis);
  for (double gamma : {1e-3, 1e-2}) {
    const MixedState me = lindblad_evolve(to_mixed(psi), block, gamma, xy.t_c);
    const MixedState traj = stochastic_evolve(psi, block, gamma, xy.t_c, 1e-2, 1000, 4);
    EXPECT_LE(trace_distance(me, traj), 0.01);
    EXPECT_NEAR(traj.trace(), 1.0, 1e-10);
  }
}

TEST(Trajectories, DeterministicAcrossThreadCounts) {
  const SpinNetwork net = star(2).with_field(0.7);
  const SectorState psi = prepare_input(net, M_PI / 2, 0.0);
  const HamiltonianBlock block = build_block(net, psi.basis);
  const MixedState a = stochastic_evolve(psi, block, 0.05, 2.0, 0.01, 64, 8, 1);
  const MixedState b = stochastic_evolve(psi, block, 0.05, 2.0, 0.01, 64, 8, 4);
  EXPECT_EQ((a.rho - b.rho).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(stochastic_evolve(psi, block, 0.05, 2.0, 0.0, 64, 8), std::invalid_argument);
  EXPECT_THROW(stochastic_evolve(psi, block, 0.05, 2.0, 0.01, 0, 8), std::invalid_argument);
}

TEST(NoisyNetwork, Limits) {
  const auto xy = analytic::star_analytics(2, analytic::Model::xy);
  EXPECT_NEAR(noisy_network_fidelity(star(2), 0.0, xy.b_opt, M_PI / 2, 0.0, xy.t_c), kXyStar2, 1e-6);
  EXPECT_NEAR(noisy_network_fidelity(star(2), 0.0, xy.b_opt, M_PI / 2, 1e3, xy.t_c), 0.5, 0.02);
}

TEST(NoisyNetwork, WeakNoiseRegression) {
  const auto xy = analytic::star_analytics(2, analytic::Model::xy);
  const double f = noisy_network_fidelity(star(2), 0.0, xy.b_opt, M_PI / 2, 1e-3, xy.t_c);
  EXPECT_LT(f, kXyStar2);
  EXPECT_GT(f, kXyStar2 - 1e-3 * xy.t_c);
  EXPECT_NEAR(f, 0.85316091, 1e-8);
}

TEST(Circuit, CompiledCnotMatchesIdeal) {
  // Basis index bit k is qubit k.
  for (const auto& [c, t] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 0}}) {
    Eigen::MatrixXcd ideal = Eigen::MatrixXcd::Zero(4, 4);
    for (Eigen::Index in = 0; in < 4; ++in) {
      const Eigen::Index out = ((in >> c) & 1) ? in ^ (Eigen::Index{1} << t) : in;
      ideal(out, in) = 1.0;
    }
    const auto schedule = compile_to_pulses({Cnot{c, t}});
    EXPECT_LE(phase_free_matrix_distance(schedule_unitary(schedule, 2), ideal), 1e-12);
    EXPECT_NEAR(schedule_duration(schedule), 2 * kHalfSwapDuration, 1e-15);
  }
}

TEST(Circuit, CompiledControlledRyMatchesIdeal) {
  const double angle = 0.9;
  Eigen::MatrixXcd ideal = Eigen::MatrixXcd::Identity(4, 4);
  // Control qubit 0, target qubit 1: the block with bit 0 set is {1, 3}.
  ideal(1, 1) = std::cos(angle / 2);
  ideal(3, 1) = std::sin(angle / 2);
  ideal(1, 3) = -std::sin(angle / 2);
  ideal(3, 3) = std::cos(angle / 2);
  const auto schedule = compile_to_pulses({ControlledRy{0, 1, angle}});
  EXPECT_LE(phase_free_matrix_distance(schedule_unitary(schedule, 2), ideal), 1e-12);
}

TEST(Circuit, IdealFidelities) {
  EXPECT_NEAR(circuit_ideal_fidelity(2, M_PI / 2), kXyStar2, 1e-12);
  EXPECT_NEAR(circuit_ideal_fidelity(3, M_PI / 2), 0.5 + 0.5 / std::sqrt(3.0), 1e-12);
  for (std::size_t m : {2u, 3u}) {
    for (double theta : {0.0, 0.7, M_PI / 2, 2.4}) {
      EXPECT_NEAR(circuit_baseline(m, theta, 0.0), circuit_ideal_fidelity(m, theta), 1e-9);
    }
  }
  EXPECT_THROW(pcc_circuit(4), std::invalid_argument);
}

TEST(Circuit, NoiseOrderingAndMonotonicity) {
  for (std::size_t m : {2u, 3u}) {
    const auto xy = analytic::star_analytics(m, analytic::Model::xy);
    const double network = noisy_network_fidelity(star(m), 0.0, xy.b_opt, M_PI / 2, 1e-3, xy.t_c);
    EXPECT_GT(network, circuit_baseline(m, M_PI / 2, 1e-3));
    double previous = circuit_baseline(m, M_PI / 2, 0.0);
    for (int k = 0; k < 10; ++k) {
      const double gamma = std::pow(10.0, -4.0 + k / 3.0);
      const double f = circuit_baseline(m, M_PI / 2, gamma);
      EXPECT_LE(f, previous + 1e-12);
      previous = f;
    }
  }
}
