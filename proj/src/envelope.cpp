#include "persuade/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "persuade/errors.hpp"
#include "persuade/numeric.hpp"

namespace persuade::envelope {
namespace {

std::vector<double> build_grid(double a, double b, const EnvelopeOptions& opt) {
  if (opt.grid_n < 3) throw DomainError("envelope grid needs at least 3 points");
  if (!(a < b)) throw DomainError("envelope interval is empty");
  auto grid = numeric::linspace(a, b, opt.grid_n);
  const double snap = (b - a) / static_cast<double>(opt.grid_n - 1) * 1e-6;
  auto force = [&](double k) {
    if (!(k > a && k < b)) return;
    auto it = std::lower_bound(grid.begin(), grid.end(), k);
    if (it != grid.end() && *it - k <= snap) {
      *it = k;
    } else if (it != grid.begin() && k - *(it - 1) <= snap) {
      *(it - 1) = k;
    } else {
      grid.insert(it, k);
    }
  };
  for (double k : opt.knots) force(k);
  for (double k : opt.usc_points) force(k);
  return grid;
}

double checked(double v, double x) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite function value at " << x;
    throw DomainError(os.str());
  }
  return v;
}

double cross(double x0, double y0, double x1, double y1, double x2, double y2) {
  return (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0);
}

}  // namespace

EnvelopeResult concave_envelope(const Fn& f, double a, double b, const EnvelopeOptions& opt) {
  EnvelopeResult r;
  r.grid = build_grid(a, b, opt);
  const std::size_t n = r.grid.size();
  r.input.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.input[i] = checked(f(r.grid[i]), r.grid[i]);

  const double delta = 1e-12 * (b - a);
  for (double u : opt.usc_points) {
    auto it = std::find(r.grid.begin(), r.grid.end(), u);
    if (it == r.grid.end()) continue;
    auto i = static_cast<std::size_t>(it - r.grid.begin());
    double best = r.input[i];
    if (u - delta >= a) best = std::max(best, checked(f(u - delta), u));
    if (u + delta <= b) best = std::max(best, checked(f(u + delta), u));
    r.input[i] = best;
  }

  for (std::size_t i = 0; i < n; ++i) {
    while (r.hull.size() >= 2) {
      std::size_t i0 = r.hull[r.hull.size() - 2];
      std::size_t i1 = r.hull.back();
      if (cross(r.grid[i0], r.input[i0], r.grid[i1], r.input[i1], r.grid[i], r.input[i]) >= 0.0) {
        r.hull.pop_back();
      } else {
        break;
      }
    }
    r.hull.push_back(i);
  }

  r.values.assign(n, 0.0);
  for (std::size_t h = 0; h + 1 < r.hull.size(); ++h) {
    std::size_t i = r.hull[h];
    std::size_t j = r.hull[h + 1];
    r.values[i] = r.input[i];
    r.values[j] = r.input[j];
    bool lifted = false;
    for (std::size_t k = i + 1; k < j; ++k) {
      double w = (r.grid[k] - r.grid[i]) / (r.grid[j] - r.grid[i]);
      r.values[k] = r.input[i] + w * (r.input[j] - r.input[i]);
      if (r.values[k] - r.input[k] > opt.contact_tol) lifted = true;
    }
    if (lifted) r.segments.push_back({r.grid[i], r.grid[j]});
  }
  if (r.hull.size() == 1) r.values[r.hull[0]] = r.input[r.hull[0]];
  for (std::size_t k = 0; k < n; ++k) {
    if (r.values[k] - r.input[k] <= opt.contact_tol) r.contact_set.push_back(r.grid[k]);
  }
  return r;
}

EnvelopeResult convex_minorant(const Fn& f, double a, double b, const EnvelopeOptions& opt) {
  EnvelopeResult r = concave_envelope([&](double x) { return -f(x); }, a, b, opt);
  for (auto& v : r.input) v = -v;
  for (auto& v : r.values) v = -v;
  return r;
}

double EnvelopeResult::operator()(double x) const {
  const double a = grid.front();
  const double b = grid.back();
  const double slack = 1e-12 * (b - a);
  if (!(x >= a - slack && x <= b + slack)) {
    std::ostringstream os;
    os << "envelope evaluated outside [" << a << ", " << b << "] at " << x;
    throw DomainError(os.str());
  }
  x = std::clamp(x, a, b);
  // hull vertices are grid indices in increasing order
  std::size_t lo = 0;
  std::size_t hi = hull.size() - 1;
  if (hull.size() == 1) return values[hull[0]];
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (grid[hull[mid]] <= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x0 = grid[hull[lo]];
  double x1 = grid[hull[hi]];
  double w = (x - x0) / (x1 - x0);
  return values[hull[lo]] + w * (values[hull[hi]] - values[hull[lo]]);
}

std::optional<Segment> EnvelopeResult::segment_containing(double x) const {
  for (const auto& s : segments) {
    if (x > s.left && x < s.right) return s;
  }
  return std::nullopt;
}

LocalConcavification::LocalConcavification(Fn f, double kink, std::size_t grid_n)
    : f_(std::move(f)), kink_(kink) {
  if (!(kink > 0.0 && kink < 1.0)) throw DomainError("kink must lie in (0, 1)");
  EnvelopeOptions opt;
  opt.grid_n = grid_n;
  left_ = concave_envelope(f_, 0.0, kink_, opt);
  right_ = concave_envelope(f_, kink_, 1.0, opt);
}

std::optional<Segment> LocalConcavification::lifted_segment(double x) const {
  return x <= kink_ ? left_.segment_containing(x) : right_.segment_containing(x);
}

double LocalConcavification::operator()(double x) const {
  double fx = f_(x);
  auto seg = lifted_segment(x);
  if (!seg) return fx;
  const EnvelopeResult& side = x <= kink_ ? left_ : right_;
  return std::max(fx, side(x));
}

TangencyResult tangent_from_point(const Fn& f, double x0, double y0, double lo, double hi,
                                  SlopeDirection dir, bool concave, const Fn& df) {
  if (!(lo < hi)) throw DomainError("tangency search interval is empty");
  // Keep away from the anchor so the chord slope is defined.
  const double gap = 1e-12 * (hi - lo);
  if (std::abs(lo - x0) < gap) lo += gap;
  if (std::abs(hi - x0) < gap) hi -= gap;
  const double sign = dir == SlopeDirection::Maximize ? 1.0 : -1.0;
  auto slope = [&](double t) { return (f(t) - y0) / (t - x0); };
  auto obj = [&](double t) { return sign * slope(t); };

  double a = lo;
  double b = hi;
  if (!concave) {
    auto grid = numeric::linspace(lo, hi, 2001);
    std::size_t best = 0;
    double best_v = obj(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      double v = obj(grid[i]);
      if (v >= best_v) {
        best_v = v;
        best = i;
      }
    }
    a = grid[best == 0 ? 0 : best - 1];
    b = grid[std::min(best + 1, grid.size() - 1)];
  }
  auto g = numeric::golden_max(obj, a, b);
  double t = g.x;

  if (df && concave && t > lo && t < hi) {
    // The line tangent at s passes through the anchor when h(s) = 0.
    auto h = [&](double s) { return f(s) + df(s) * (x0 - s) - y0; };
    double w = 1e-6 * (hi - lo);
    for (int k = 0; k < 40; ++k, w *= 2.0) {
      double l = std::max(lo, t - w);
      double r = std::min(hi, t + w);
      if (auto root = numeric::bisect(h, l, r)) {
        if (obj(*root) >= g.value - 1e-15 * (1.0 + std::abs(g.value))) t = *root;
        break;
      }
      if (l == lo && r == hi) break;
    }
  }

  double best_t = t;
  double best_v = obj(t);
  for (double c : {lo, hi}) {
    double v = obj(c);
    if (v > best_v + 1e-15 * (1.0 + std::abs(best_v)) ||
        (v >= best_v - 1e-15 * (1.0 + std::abs(best_v)) && c > best_t)) {
      best_v = std::max(best_v, v);
      best_t = c;
    }
  }
  return {best_t, slope(best_t), true};
}

std::optional<double> chord_crossing(const Fn& f, const Fn& g, double a, double b) {
  return numeric::bisect([&](double x) { return f(x) - g(x); }, a, b);
}

}  // namespace persuade::envelope
