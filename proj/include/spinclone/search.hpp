#pragma once

// Grid + refinement maximization of clone fidelity over evolution time and
// field, and seeded coupling-disorder averaging.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "spinclone/dynamics.hpp"
#include "spinclone/parallel.hpp"
#include "spinclone/topology.hpp"

namespace spinclone {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double clamp(double x) const { return std::clamp(x, lo, hi); }
};

/// Scan ranges in units of J: times as Jt, fields as B/J.
struct GridSpec {
  Interval t_range{0.0, 10.0};
  std::size_t t_points = 600;
  Interval b_range{0.0, 2.0};
  std::size_t b_points = 60;  // 1 with a degenerate range pins the field
  double refine_tolerance = 1e-7;
  std::size_t candidates = 10;     // coarse peaks carried into refinement
  std::size_t window_points = 41;  // per axis, dense scan around each peak
  std::size_t max_refine_rounds = 60;

  void validate() const {
    if (t_points < 2 || !(t_range.hi > t_range.lo)) throw std::invalid_argument("GridSpec: degenerate time grid");
    if (t_range.lo < 0.0) throw std::invalid_argument("GridSpec: negative time");
    if (b_points == 1) {
      if (b_range.hi != b_range.lo) throw std::invalid_argument("GridSpec: single field point needs a degenerate range");
    } else if (b_points < 2 || !(b_range.hi > b_range.lo)) {
      throw std::invalid_argument("GridSpec: degenerate field grid");
    }
    if (!(refine_tolerance > 0.0)) throw std::invalid_argument("GridSpec: refine tolerance must be positive");
    if (candidates == 0 || window_points < 3) throw std::invalid_argument("GridSpec: bad refinement settings");
  }

  bool fixed_field() const { return b_points == 1; }

  double t_at(std::size_t i) const {
    return t_range.lo + t_range.width() * static_cast<double>(i) / static_cast<double>(t_points - 1);
  }
  double b_at(std::size_t k) const {
    if (fixed_field()) return b_range.lo;
    return b_range.lo + b_range.width() * static_cast<double>(k) / static_cast<double>(b_points - 1);
  }
  double t_step() const { return t_range.width() / static_cast<double>(t_points - 1); }
  double b_step() const { return fixed_field() ? 0.0 : b_range.width() / static_cast<double>(b_points - 1); }

  /// Same coarse grid, field pinned at b.
  static GridSpec fixed(Interval t_range, std::size_t t_points, double b) {
    GridSpec g;
    g.t_range = t_range;
    g.t_points = t_points;
    g.b_range = {b, b};
    g.b_points = 1;
    return g;
  }
};

struct RefinementStep {
  double t = 0.0;
  double b = 0.0;
  double fidelity = 0.0;
};

struct OptimizationResult {
  double max_fidelity = 0.0;
  double t_c = 0.0;    // Jt
  double b_opt = 0.0;  // B/J
  GridSpec grid;
  std::size_t n_evaluations = 0;
  std::vector<RefinementStep> refinement_history;

  double j_over_b() const {
    return b_opt == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / b_opt;
  }
};

/// A fidelity surface over (t, b). row() evaluates one time slice for many
/// fields, which lets implementations share per-time work.
template <class L>
concept Landscape = requires(const L& l, double t, double b, std::span<const double> bs) {
  { l(t, b) } -> std::convertible_to<double>;
  { l.row(t, bs) } -> std::convertible_to<std::vector<double>>;
};

/// Landscape of the mean clone fidelity of a cached protocol.
class ProtocolLandscape {
 public:
  explicit ProtocolLandscape(const CloningProtocol& protocol) : protocol_(&protocol) {}

  double operator()(double t, double b) const { return protocol_->mean_fidelity(t, b); }

  std::vector<double> row(double t, std::span<const double> bs) const {
    const auto rhos = protocol_->zero_field_densities(t);
    std::vector<double> out;
    out.reserve(bs.size());
    for (double b : bs) out.push_back(protocol_->mean_fidelity_from(rhos, b, t));
    return out;
  }

 private:
  const CloningProtocol* protocol_;
};

namespace detail {

struct Point {
  double t = 0.0;
  double b = 0.0;
  double fidelity = -1.0;
};

// Order for picking winners: higher fidelity, ties (within tol) to smaller t then smaller b.
inline bool better(const Point& a, const Point& b, double tol) {
  if (a.fidelity > b.fidelity + tol) return true;
  if (b.fidelity > a.fidelity + tol) return false;
  if (a.t != b.t) return a.t < b.t;
  return a.b < b.b;
}

// Golden-section maximization of f over [lo, hi]; returns the best point seen,
// never worse than the incumbent (x0, f0).
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double x0, double f0, double x_tol,
                                     std::size_t& evaluations) {
  constexpr double inv_phi = 0.6180339887498949;
  double best_x = x0, best_f = f0;
  auto probe = [&](double x) {
    const double v = f(x);
    ++evaluations;
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
    return v;
  };
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = probe(c), fd = probe(d);
  while (b - a > x_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = probe(d);
    }
  }
  return {best_x, best_f};
}

}  // namespace detail

/// Coarse grid scan, dense windows around the best coarse peaks, then
/// coordinate-wise golden-section refinement until the fidelity gain drops
/// below grid.refine_tolerance. Deterministic for any thread count.
template <Landscape L>
OptimizationResult optimize_landscape(const L& landscape, const GridSpec& grid, unsigned threads = 0) {
  grid.validate();
  const std::size_t n_b = grid.b_points;
  std::vector<double> bs(n_b);
  for (std::size_t k = 0; k < n_b; ++k) bs[k] = grid.b_at(k);

  // Coarse scan.
  std::vector<detail::Point> row_best(grid.t_points);
  parallel_for(grid.t_points, threads, [&](std::size_t i) {
    const double t = grid.t_at(i);
    const std::vector<double> values = landscape.row(t, bs);
    detail::Point best{t, bs[0], values[0]};
    for (std::size_t k = 1; k < n_b; ++k) {
      if (values[k] > best.fidelity) best = {t, bs[k], values[k]};
    }
    row_best[i] = best;
  });
  std::size_t evaluations = grid.t_points * n_b;

  // Local maxima along t of the per-slice best; a plateau is represented by its left end.
  std::vector<detail::Point> peaks;
  for (std::size_t i = 0; i < grid.t_points; ++i) {
    const double f = row_best[i].fidelity;
    const bool left_ok = i == 0 || f > row_best[i - 1].fidelity;
    const bool right_ok = i + 1 == grid.t_points || f >= row_best[i + 1].fidelity;
    if (left_ok && right_ok) peaks.push_back(row_best[i]);
  }
  const double tol = grid.refine_tolerance;
  std::sort(peaks.begin(), peaks.end(), [&](const auto& a, const auto& b) { return detail::better(a, b, 0.0); });
  if (peaks.size() > grid.candidates) peaks.resize(grid.candidates);

  const double dt = grid.t_step();
  const double db = grid.b_step();
  const std::size_t w = grid.window_points;

  struct Refined {
    detail::Point point;
    std::size_t evaluations = 0;
    std::vector<RefinementStep> history;
  };
  std::vector<Refined> refined(peaks.size());

  parallel_for(peaks.size(), threads, [&](std::size_t p) {
    Refined out;
    detail::Point best = peaks[p];
    out.history.push_back({best.t, best.b, best.fidelity});

    // Field windows never exceed half a period of the b t rotation.
    auto b_half_width = [&](double t, double spacing) {
      return t > 0.0 ? std::min(spacing, M_PI / t) : spacing;
    };

    // Dense window.
    {
      const Interval tw{grid.t_range.clamp(best.t - dt), grid.t_range.clamp(best.t + dt)};
      const double hb = grid.fixed_field() ? 0.0 : b_half_width(best.t, db);
      const Interval bw{grid.b_range.clamp(best.b - hb), grid.b_range.clamp(best.b + hb)};
      std::vector<double> wbs;
      if (grid.fixed_field()) {
        wbs.push_back(grid.b_range.lo);
      } else {
        for (std::size_t k = 0; k < w; ++k) {
          wbs.push_back(bw.lo + bw.width() * static_cast<double>(k) / static_cast<double>(w - 1));
        }
      }
      for (std::size_t i = 0; i < w; ++i) {
        const double t = tw.lo + tw.width() * static_cast<double>(i) / static_cast<double>(w - 1);
        const std::vector<double> values = landscape.row(t, wbs);
        out.evaluations += wbs.size();
        for (std::size_t k = 0; k < wbs.size(); ++k) {
          const detail::Point candidate{t, wbs[k], values[k]};
          if (candidate.fidelity > best.fidelity) best = candidate;
        }
      }
      out.history.push_back({best.t, best.b, best.fidelity});
    }

    // Coordinate-wise golden section.
    const double ht = 2.0 * dt / static_cast<double>(w - 1);
    const double hb_base = 2.0 * db / static_cast<double>(w - 1);
    for (std::size_t round = 0; round < grid.max_refine_rounds; ++round) {
      const double before = best.fidelity;
      {
        const Interval span{grid.t_range.clamp(best.t - ht), grid.t_range.clamp(best.t + ht)};
        const double b = best.b;
        auto [t, f] = detail::golden_max([&](double x) { return landscape(x, b); }, span.lo, span.hi, best.t,
                                         best.fidelity, 1e-10 * std::max(1.0, span.width()), out.evaluations);
        best = {t, b, f};
      }
      if (!grid.fixed_field()) {
        const double hb = b_half_width(best.t, hb_base);
        const Interval span{grid.b_range.clamp(best.b - hb), grid.b_range.clamp(best.b + hb)};
        const double t = best.t;
        auto [b, f] = detail::golden_max([&](double x) { return landscape(t, x); }, span.lo, span.hi, best.b,
                                         best.fidelity, 1e-12 * std::max(1.0, span.width()), out.evaluations);
        best = {t, b, f};
      }
      out.history.push_back({best.t, best.b, best.fidelity});
      if (best.fidelity - before < tol) break;
    }
    out.point = best;
    refined[p] = std::move(out);
  });

  OptimizationResult result;
  result.grid = grid;
  std::size_t winner = 0;
  for (std::size_t p = 0; p < refined.size(); ++p) {
    evaluations += refined[p].evaluations;
    if (p > 0 && detail::better(refined[p].point, refined[winner].point, tol)) winner = p;
  }
  const detail::Point& best = refined[winner].point;
  result.max_fidelity = best.fidelity;
  result.t_c = best.t;
  result.b_opt = best.b;
  result.n_evaluations = evaluations;
  result.refinement_history = refined[winner].history;
  return result;
}

inline OptimizationResult optimize(const SpinNetwork& net, double lambda, double theta, const GridSpec& grid,
                                   unsigned threads = 0) {
  const CloningProtocol protocol(net, lambda, theta, 0.0);
  return optimize_landscape(ProtocolLandscape(protocol), grid, threads);
}

/// Default scan for trees: single-excitation dynamics, Jt in [0, 100], B/J in [0, 2].
inline GridSpec default_tree_grid() {
  GridSpec g;
  g.t_range = {0.0, 100.0};
  g.t_points = 2001;
  g.b_range = {0.0, 2.0};
  g.b_points = 60;
  return g;
}

/// 1 -> k^(j+1) cloning on a regular tree (input at the root, blanks on the last level).
inline OptimizationResult optimize_tree(std::size_t k, std::size_t levels, double lambda = 0.0,
                                        double theta = M_PI / 2, const GridSpec& grid = default_tree_grid(),
                                        unsigned threads = 0) {
  return optimize(tree(k, levels), lambda, theta, grid, threads);
}

struct DisorderSummary {
  std::size_t samples = 0;
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;
  double ideal_fidelity = 0.0;
  double relative_drop = 0.0;  // 1 - mean / ideal
};

/// Average clone fidelity over seeded coupling realizations, each evaluated
/// at the fixed (t, b) of the ideal network.
inline DisorderSummary disorder_study(const SpinNetwork& net, double epsilon, std::size_t samples, double lambda,
                                      double theta, double t_fixed, double b_fixed, std::uint64_t seed,
                                      unsigned threads = 0) {
  if (samples == 0) throw std::invalid_argument("disorder_study: need at least one sample");
  const double ideal = run_protocol(net, lambda, b_fixed, theta, 0.0, t_fixed).mean_fidelity;
  std::vector<double> deviations(samples);
  parallel_for(samples, threads, [&](std::size_t s) {
    const SpinNetwork realization = jitter(net, epsilon, mix_seed(seed, s));
    deviations[s] = run_protocol(realization, lambda, b_fixed, theta, 0.0, t_fixed).mean_fidelity - ideal;
  });
  CompensatedSum sum;
  for (double d : deviations) sum.add(d);
  const double mean_dev = sum.value() / static_cast<double>(samples);
  CompensatedSum squares;
  for (double d : deviations) squares.add((d - mean_dev) * (d - mean_dev));
  DisorderSummary summary;
  summary.samples = samples;
  summary.ideal_fidelity = ideal;
  summary.mean_fidelity = ideal + mean_dev;
  summary.std_fidelity = samples > 1 ? std::sqrt(squares.value() / static_cast<double>(samples - 1)) : 0.0;
  summary.relative_drop = -mean_dev / ideal;
  return summary;
}

}  // namespace spinclone
