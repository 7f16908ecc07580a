#pragma once

// Coupling graphs for cloning networks: spin star, regular tree and the
// complete bipartite N -> M network, plus seeded coupling disorder and a
// line-based text dump.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinclone/errors.hpp"

namespace spinclone {

// Configuration words are 64-bit with site 0 in the lowest bit.
inline constexpr std::size_t kMaxSites = 63;

struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double coupling = 1.0;  // J_ij

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable description of a spin network: sites, exchange edges, per-site
/// longitudinal field, exchange anisotropy and the input / output roles.
class SpinNetwork {
 public:
  SpinNetwork() = default;

  /// Validating constructor. Throws std::invalid_argument on out-of-range or
  /// repeated edges, self loops, bad roles or lambda outside [0, 1].
  SpinNetwork(std::size_t n_sites, std::vector<Edge> edges, std::vector<double> field,
              double anisotropy, std::vector<std::size_t> input_sites,
              std::vector<std::size_t> output_sites)
      : n_sites_(n_sites),
        edges_(std::move(edges)),
        field_(std::move(field)),
        anisotropy_(anisotropy),
        inputs_(std::move(input_sites)),
        outputs_(std::move(output_sites)) {
    validate();
  }

  std::size_t n_sites() const { return n_sites_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& field() const { return field_; }
  double anisotropy() const { return anisotropy_; }
  const std::vector<std::size_t>& input_sites() const { return inputs_; }
  const std::vector<std::size_t>& output_sites() const { return outputs_; }

  bool has_uniform_field() const {
    return std::all_of(field_.begin(), field_.end(),
                       [&](double b) { return b == field_.front(); });
  }

  SpinNetwork with_field(double b) const {
    SpinNetwork copy = *this;
    copy.field_.assign(n_sites_, b);
    return copy;
  }

  SpinNetwork with_anisotropy(double lambda) const {
    SpinNetwork copy = *this;
    copy.anisotropy_ = lambda;
    copy.validate();
    return copy;
  }

  /// Same graph and roles with new per-edge couplings (same order as edges()).
  SpinNetwork with_couplings(const std::vector<double>& couplings) const {
    if (couplings.size() != edges_.size()) {
      throw std::invalid_argument("with_couplings: coupling count does not match edge count");
    }
    SpinNetwork copy = *this;
    for (std::size_t e = 0; e < edges_.size(); ++e) copy.edges_[e].coupling = couplings[e];
    return copy;
  }

  friend bool operator==(const SpinNetwork&, const SpinNetwork&) = default;

 private:
  void validate() const {
    if (n_sites_ == 0) throw std::invalid_argument("SpinNetwork: no sites");
    if (n_sites_ > kMaxSites) {
      throw ResourceExhausted("SpinNetwork: " + std::to_string(n_sites_) +
                              " sites exceeds the configuration-word limit of " +
                              std::to_string(kMaxSites));
    }
    if (field_.size() != n_sites_) throw std::invalid_argument("SpinNetwork: field size mismatch");
    if (!(anisotropy_ >= 0.0 && anisotropy_ <= 1.0)) {
      throw std::invalid_argument("SpinNetwork: anisotropy must lie in [0, 1]");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const Edge& e : edges_) {
      if (e.i >= n_sites_ || e.j >= n_sites_) throw std::invalid_argument("SpinNetwork: edge index out of range");
      if (e.i == e.j) throw std::invalid_argument("SpinNetwork: self loop");
      if (!seen.insert(std::minmax(e.i, e.j)).second) {
        throw std::invalid_argument("SpinNetwork: duplicate undirected edge");
      }
    }
    auto check_roles = [&](const std::vector<std::size_t>& sites, const char* what) {
      std::set<std::size_t> unique(sites.begin(), sites.end());
      if (unique.size() != sites.size()) throw std::invalid_argument(std::string("SpinNetwork: repeated ") + what);
      for (std::size_t s : sites) {
        if (s >= n_sites_) throw std::invalid_argument(std::string("SpinNetwork: ") + what + " out of range");
      }
    };
    check_roles(inputs_, "input site");
    check_roles(outputs_, "output site");
  }

  std::size_t n_sites_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> field_;
  double anisotropy_ = 0.0;
  std::vector<std::size_t> inputs_;
  std::vector<std::size_t> outputs_;
};

/// Generic builder; uniform field b on every site.
inline SpinNetwork from_edge_list(std::size_t n_sites, std::vector<Edge> edges,
                                  std::vector<std::size_t> inputs, std::vector<std::size_t> outputs,
                                  double b = 0.0, double lambda = 0.0) {
  return SpinNetwork(n_sites, std::move(edges), std::vector<double>(n_sites, b), lambda,
                     std::move(inputs), std::move(outputs));
}

/// Spin star: center 0 holds the input (and doubles as ancilla), leaves 1..M are blanks.
inline SpinNetwork star(std::size_t m, double j = 1.0) {
  if (m == 0) throw std::invalid_argument("star: M must be at least 1");
  if (m + 1 > kMaxSites) throw ResourceExhausted("star: too many leaves");
  std::vector<Edge> edges;
  std::vector<std::size_t> outputs;
  for (std::size_t leaf = 1; leaf <= m; ++leaf) {
    edges.push_back({0, leaf, j});
    outputs.push_back(leaf);
  }
  return from_edge_list(m + 1, std::move(edges), {0}, std::move(outputs));
}

/// Number of sites of a k-ary tree with `levels` intermediate levels;
/// saturates at SIZE_MAX on overflow.
inline std::size_t tree_site_count(std::size_t k, std::size_t levels) {
  std::size_t total = 1;
  std::size_t width = 1;
  for (std::size_t level = 0; level <= levels; ++level) {
    if (width > std::numeric_limits<std::size_t>::max() / k) return std::numeric_limits<std::size_t>::max();
    width *= k;
    if (total > std::numeric_limits<std::size_t>::max() - width) return std::numeric_limits<std::size_t>::max();
    total += width;
  }
  return total;
}

/// Regular tree: root 0 is the input, `levels` intermediate levels, and the
/// k^(levels+1) sites of the last level are the blanks. Sites are numbered
/// breadth first.
inline SpinNetwork tree(std::size_t k, std::size_t levels, double j = 1.0,
                        std::size_t max_sites = kMaxSites) {
  if (k < 2) throw std::invalid_argument("tree: branching factor must be at least 2");
  const std::size_t total = tree_site_count(k, levels);
  if (total > max_sites || total > kMaxSites) {
    throw ResourceExhausted("tree: site count exceeds the configured maximum of " +
                            std::to_string(std::min(max_sites, kMaxSites)));
  }
  std::vector<Edge> edges;
  std::vector<std::size_t> frontier{0};
  std::size_t next = 1;
  for (std::size_t level = 0; level <= levels; ++level) {
    std::vector<std::size_t> children;
    for (std::size_t parent : frontier) {
      for (std::size_t c = 0; c < k; ++c) {
        edges.push_back({parent, next, j});
        children.push_back(next++);
      }
    }
    frontier = std::move(children);
  }
  return from_edge_list(total, std::move(edges), {0}, std::move(frontier));
}

/// Complete bipartite K_{N,M}: inputs 0..N-1, outputs N..N+M-1.
inline SpinNetwork bipartite(std::size_t n_in, std::size_t m_out, double j = 1.0) {
  if (n_in < 1) throw std::invalid_argument("bipartite: need at least one input");
  if (n_in >= m_out) throw std::invalid_argument("bipartite: N must be smaller than M");
  if (n_in + m_out > kMaxSites) throw ResourceExhausted("bipartite: too many sites");
  std::vector<Edge> edges;
  std::vector<std::size_t> inputs, outputs;
  for (std::size_t a = 0; a < n_in; ++a) inputs.push_back(a);
  for (std::size_t b = 0; b < m_out; ++b) outputs.push_back(n_in + b);
  for (std::size_t a = 0; a < n_in; ++a) {
    for (std::size_t b = 0; b < m_out; ++b) edges.push_back({a, n_in + b, j});
  }
  return from_edge_list(n_in + m_out, std::move(edges), std::move(inputs), std::move(outputs));
}

/// Resamples every coupling uniformly in [(1-eps) J, (1+eps) J].
inline SpinNetwork jitter(const SpinNetwork& net, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("jitter: epsilon must lie in [0, 1)");
  if (epsilon == 0.0) return net;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> couplings;
  couplings.reserve(net.edges().size());
  for (const Edge& e : net.edges()) couplings.push_back(e.coupling * (1.0 + epsilon * unit(rng)));
  return net.with_couplings(couplings);
}

inline bool is_connected(const SpinNetwork& net, std::size_t from = 0) {
  std::vector<std::vector<std::size_t>> adjacency(net.n_sites());
  for (const Edge& e : net.edges()) {
    adjacency[e.i].push_back(e.j);
    adjacency[e.j].push_back(e.i);
  }
  std::vector<bool> seen(net.n_sites(), false);
  std::queue<std::size_t> pending;
  pending.push(from);
  seen[from] = true;
  std::size_t reached = 1;
  while (!pending.empty()) {
    const std::size_t s = pending.front();
    pending.pop();
    for (std::size_t t : adjacency[s]) {
      if (!seen[t]) {
        seen[t] = true;
        ++reached;
        pending.push(t);
      }
    }
  }
  return reached == net.n_sites();
}

// Text dump:
//   sites <n> lambda <L>
//   edge <i> <j> <J>      (one per edge)
//   field <i> <B>         (one per site)
//   input <i> / output <i>
// Reals are printed with 17 significant digits so a dump reloads exactly.
inline std::string to_text(const SpinNetwork& net) {
  auto real = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "sites " << net.n_sites() << " lambda " << real(net.anisotropy()) << '\n';
  for (const Edge& e : net.edges()) out << "edge " << e.i << ' ' << e.j << ' ' << real(e.coupling) << '\n';
  for (std::size_t s = 0; s < net.n_sites(); ++s) out << "field " << s << ' ' << real(net.field()[s]) << '\n';
  for (std::size_t s : net.input_sites()) out << "input " << s << '\n';
  for (std::size_t s : net.output_sites()) out << "output " << s << '\n';
  return out.str();
}

inline SpinNetwork parse_network(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  double lambda = 0.0;
  bool have_header = false;
  std::vector<Edge> edges;
  std::vector<double> field;
  std::vector<std::size_t> inputs, outputs;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("parse_network: line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string key;
    if (!(tokens >> key)) continue;
    if (key == "sites") {
      std::string lambda_key;
      if (!(tokens >> n >> lambda_key >> lambda) || lambda_key != "lambda") fail("malformed header");
      have_header = true;
      field.assign(n, 0.0);
      continue;
    }
    if (!have_header) fail("expected 'sites N lambda L' header first");
    if (key == "edge") {
      Edge e;
      if (!(tokens >> e.i >> e.j >> e.coupling)) fail("malformed edge");
      edges.push_back(e);
    } else if (key == "field") {
      std::size_t s = 0;
      double b = 0.0;
      if (!(tokens >> s >> b) || s >= n) fail("malformed field");
      field[s] = b;
    } else if (key == "input" || key == "output") {
      std::size_t s = 0;
      if (!(tokens >> s)) fail("malformed role");
      (key == "input" ? inputs : outputs).push_back(s);
    } else {
      fail("unknown record '" + key + "'");
    }
  }
  if (!have_header) throw std::invalid_argument("parse_network: empty input");
  return SpinNetwork(n, std::move(edges), std::move(field), lambda, std::move(inputs), std::move(outputs));
}

inline SpinNetwork parse_network(const std::string& text) {
  std::istringstream in(text);
  return parse_network(in);
}

}  // namespace spinclone
