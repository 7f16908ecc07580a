#pragma once

// Input preparation, exact evolution, single-clone reduction and fidelity.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "spinclone/hamiltonian.hpp"
#include "spinclone/sector.hpp"
#include "spinclone/topology.hpp"

namespace spinclone {

using cplx = std::complex<double>;

struct SectorState {
  BasisPtr basis;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

/// Reduced state of one qubit, rows/columns ordered (|0>, |1>).
struct QubitDensity {
  Eigen::Matrix2cd matrix = Eigen::Matrix2cd::Zero();

  cplx operator()(int r, int c) const { return matrix(r, c); }
  double trace() const { return (matrix(0, 0) + matrix(1, 1)).real(); }
  double hermiticity_error() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(matrix);
    return solver.eigenvalues()[0];
  }

  /// Conjugation by exp(-i angle sz / 2): only the coherence picks up a phase.
  QubitDensity rotated_about_z(double angle) const {
    QubitDensity out = *this;
    const cplx phase = std::polar(1.0, -angle);
    out.matrix(0, 1) *= phase;
    out.matrix(1, 0) *= std::conj(phase);
    return out;
  }
};

struct CloneResult {
  std::map<std::size_t, double> per_site_fidelity;
  double mean_fidelity = 0.0;
  double time = 0.0;  // Jt
  double theta = 0.0;
  double phi = 0.0;
  double anisotropy = 0.0;
  double field = 0.0;  // B/J
};

inline Eigen::Vector2cd qubit_state(double theta, double phi) {
  return {cplx(std::cos(0.5 * theta), 0.0), std::polar(std::sin(0.5 * theta), phi)};
}

/// Every input site in cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, every other site in |0>.
inline SectorState prepare_input(const SpinNetwork& net, double theta, double phi) {
  const auto& inputs = net.input_sites();
  if (inputs.empty()) throw std::invalid_argument("prepare_input: network has no input sites");
  if (!(theta >= 0.0 && theta <= M_PI)) throw std::invalid_argument("prepare_input: theta outside [0, pi]");
  if (inputs.size() > 30) throw ResourceExhausted("prepare_input: too many input sites");
  auto basis = make_basis(net.n_sites(), required_weights(theta, inputs.size()));
  const Eigen::Vector2cd q = qubit_state(theta, phi);
  Eigen::VectorXcd amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
  for (std::size_t subset = 0; subset < (std::size_t{1} << inputs.size()); ++subset) {
    Config c = 0;
    cplx amplitude = 1.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const bool excited = (subset >> k) & 1U;
      if (excited) c |= Config{1} << inputs[k];
      amplitude *= q[excited ? 1 : 0];
    }
    const std::size_t index = basis->index_of(c);
    if (index != SectorBasis::npos) amplitudes[static_cast<Eigen::Index>(index)] = amplitude;
  }
  amplitudes.normalize();
  return {std::move(basis), std::move(amplitudes)};
}

/// exp(-iHt) applied through the spectral decomposition.
inline SectorState evolve(const SectorState& state, const SpectralDecomposition& spec, double t) {
  if (!same_basis(state.basis, spec.basis)) throw std::invalid_argument("evolve: state and spectrum use different bases");
  Eigen::VectorXcd coefficients = spec.eigenvectors.transpose().cast<cplx>() * state.amplitudes;
  for (Eigen::Index k = 0; k < coefficients.size(); ++k) coefficients[k] *= std::polar(1.0, -spec.eigenvalues[k] * t);
  return {state.basis, spec.eigenvectors.cast<cplx>() * coefficients};
}

/// Partial trace onto one site, computed directly on the sector representation.
inline QubitDensity reduce_to_site(const SectorState& state, std::size_t site) {
  const auto& basis = *state.basis;
  if (site >= basis.n_sites()) throw std::invalid_argument("reduce_to_site: site out of range");
  const Config bit = Config{1} << site;
  double p0 = 0.0, p1 = 0.0;
  cplx coherence = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const cplx a = state.amplitudes[static_cast<Eigen::Index>(k)];
    const Config c = basis.state(k);
    if (c & bit) {
      p1 += std::norm(a);
      const std::size_t partner = basis.index_of(c ^ bit);
      if (partner != SectorBasis::npos) coherence += state.amplitudes[static_cast<Eigen::Index>(partner)] * std::conj(a);
    } else {
      p0 += std::norm(a);
    }
  }
  QubitDensity rho;
  rho.matrix << p0, coherence, std::conj(coherence), p1;
  return rho;
}

/// <psi|rho|psi> for psi = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, clipped to [0, 1].
inline double clone_fidelity(const QubitDensity& rho, double theta, double phi) {
  const Eigen::Vector2cd psi = qubit_state(theta, phi);
  const double f = (psi.adjoint() * rho.matrix * psi)(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

inline CloneResult score_clones(const std::vector<std::size_t>& outputs, const std::vector<QubitDensity>& rhos,
                                double theta, double phi) {
  CloneResult result;
  double sum = 0.0;
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    const double f = clone_fidelity(rhos[k], theta, phi);
    result.per_site_fidelity[outputs[k]] = f;
    sum += f;
  }
  result.mean_fidelity = outputs.empty() ? 0.0 : sum / static_cast<double>(outputs.size());
  result.theta = theta;
  result.phi = phi;
  return result;
}

/// Full protocol: prepare, build the block with uniform field b, diagonalize,
/// evolve to time t and score every output site.
inline CloneResult run_protocol(const SpinNetwork& net, double lambda, double b, double theta, double phi,
                                double t) {
  const SpinNetwork configured = net.with_anisotropy(lambda).with_field(b);
  const SectorState input = prepare_input(configured, theta, phi);
  const SectorState evolved = evolve(input, spectral(build_block(configured, input.basis)), t);
  std::vector<QubitDensity> rhos;
  for (std::size_t site : configured.output_sites()) rhos.push_back(reduce_to_site(evolved, site));
  CloneResult result = score_clones(configured.output_sites(), rhos, theta, phi);
  result.time = t;
  result.anisotropy = lambda;
  result.field = b;
  return result;
}

/// Cached protocol for repeated (t, B) evaluation on one network. The
/// spectrum is computed once at zero field; a uniform field b only rotates
/// each clone about z by angle b t, since b sum_i sz_i / 2 commutes with the
/// exchange term.
class CloningProtocol {
 public:
  CloningProtocol(const SpinNetwork& net, double lambda, double theta, double phi = 0.0)
      : net_(net.with_anisotropy(lambda).with_field(0.0)), lambda_(lambda), theta_(theta), phi_(phi) {
    const SectorState input = prepare_input(net_, theta, phi);
    basis_ = input.basis;
    spec_ = spectral(build_block(net_, basis_));
    vectors_ = spec_.eigenvectors.cast<cplx>();
    coefficients_ = vectors_.transpose() * input.amplitudes;
  }

  const SpinNetwork& network() const { return net_; }
  const SpectralDecomposition& spectrum() const { return spec_; }
  double theta() const { return theta_; }
  double phi() const { return phi_; }
  double anisotropy() const { return lambda_; }

  SectorState state_at(double t) const {
    Eigen::VectorXcd c = coefficients_;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -spec_.eigenvalues[k] * t);
    return {basis_, vectors_ * c};
  }

  /// Output-site densities at zero field, in output_sites() order.
  std::vector<QubitDensity> zero_field_densities(double t) const {
    const SectorState s = state_at(t);
    std::vector<QubitDensity> rhos;
    rhos.reserve(net_.output_sites().size());
    for (std::size_t site : net_.output_sites()) rhos.push_back(reduce_to_site(s, site));
    return rhos;
  }

  static std::vector<QubitDensity> apply_field(const std::vector<QubitDensity>& zero_field, double b, double t) {
    std::vector<QubitDensity> out;
    out.reserve(zero_field.size());
    for (const auto& rho : zero_field) out.push_back(rho.rotated_about_z(b * t));
    return out;
  }

  double mean_fidelity_from(const std::vector<QubitDensity>& zero_field, double b, double t) const {
    double sum = 0.0;
    for (const auto& rho : zero_field) sum += clone_fidelity(rho.rotated_about_z(b * t), theta_, phi_);
    return sum / static_cast<double>(zero_field.size());
  }

  double mean_fidelity(double t, double b) const { return mean_fidelity_from(zero_field_densities(t), b, t); }

  CloneResult result(double t, double b) const {
    CloneResult r = score_clones(net_.output_sites(), apply_field(zero_field_densities(t), b, t), theta_, phi_);
    r.time = t;
    r.anisotropy = lambda_;
    r.field = b;
    return r;
  }

 private:
  SpinNetwork net_;
  double lambda_;
  double theta_;
  double phi_;
  BasisPtr basis_;
  SpectralDecomposition spec_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXcd coefficients_;
};

}  // namespace spinclone
