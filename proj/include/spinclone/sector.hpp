#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinclone/errors.hpp"
#include "spinclone/topology.hpp"

namespace spinclone {

using Config = std::uint64_t;

inline constexpr std::size_t kMaxBasisDimension = std::size_t{1} << 22;

inline unsigned __int128 binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

/// Configurations of n spins whose excitation number (popcount) lies in a
/// given set. States are kept in ascending integer order; that ordering is
/// part of the contract (it fixes row/column order of every block).
class SectorBasis {
 public:
  SectorBasis(std::size_t n_sites, std::set<std::size_t> weights,
              std::size_t max_dimension = kMaxBasisDimension)
      : n_sites_(n_sites), weights_(std::move(weights)) {
    if (n_sites_ == 0 || n_sites_ > kMaxSites) throw std::invalid_argument("SectorBasis: bad site count");
    if (weights_.empty()) throw std::invalid_argument("SectorBasis: empty weight set");
    unsigned __int128 total = 0;
    for (std::size_t w : weights_) {
      if (w > n_sites_) throw std::invalid_argument("SectorBasis: weight exceeds site count");
      total += binomial(n_sites_, w);
    }
    if (total > max_dimension) {
      throw ResourceExhausted("SectorBasis: dimension exceeds limit " + std::to_string(max_dimension));
    }
    states_.reserve(static_cast<std::size_t>(total));
    const Config limit = Config{1} << n_sites_;
    for (std::size_t w : weights_) {
      if (w == 0) {
        states_.push_back(0);
        continue;
      }
      // Gosper's hack: next larger word with the same popcount.
      for (Config c = (Config{1} << w) - 1; c < limit;) {
        states_.push_back(c);
        const Config lowest = c & (~c + 1);
        const Config ripple = c + lowest;
        c = (((ripple ^ c) >> 2) / lowest) | ripple;
        if (ripple == 0) break;
      }
    }
    std::sort(states_.begin(), states_.end());
  }

  static SectorBasis full(std::size_t n_sites) {
    std::set<std::size_t> all;
    for (std::size_t w = 0; w <= n_sites; ++w) all.insert(w);
    return SectorBasis(n_sites, std::move(all));
  }

  std::size_t n_sites() const { return n_sites_; }
  const std::set<std::size_t>& weights() const { return weights_; }
  const std::vector<Config>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  Config state(std::size_t index) const { return states_[index]; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t index_of(Config c) const {
    const auto it = std::lower_bound(states_.begin(), states_.end(), c);
    return (it != states_.end() && *it == c) ? static_cast<std::size_t>(it - states_.begin()) : npos;
  }

  static std::size_t weight(Config c) { return static_cast<std::size_t>(std::popcount(c)); }

  friend bool operator==(const SectorBasis& a, const SectorBasis& b) {
    return a.n_sites_ == b.n_sites_ && a.states_ == b.states_;
  }

 private:
  std::size_t n_sites_;
  std::set<std::size_t> weights_;
  std::vector<Config> states_;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

inline BasisPtr make_basis(std::size_t n_sites, std::set<std::size_t> weights) {
  return std::make_shared<const SectorBasis>(n_sites, std::move(weights));
}

inline bool same_basis(const BasisPtr& a, const BasisPtr& b) {
  return a == b || (a && b && *a == *b);
}

}  // namespace spinclone
