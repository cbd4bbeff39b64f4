#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace persuade::envelope {

using Fn = std::function<double(double)>;

struct Segment {
  double left;
  double right;
};

struct EnvelopeOptions {
  std::size_t grid_n = 2001;
  // Points forced onto the grid (kinks, jump locations).
  std::vector<double> knots;
  // Jump points where the upper semicontinuous completion is used: the
  // hull sees max(f(x), f(x-), f(x+)) there.
  std::vector<double> usc_points;
  double contact_tol = 1e-8;
};

struct EnvelopeResult {
  std::vector<double> grid;
  std::vector<double> input;   // f on the grid (after u.s.c. completion)
  std::vector<double> values;  // envelope on the grid
  std::vector<double> contact_set;
  std::vector<Segment> segments;  // stretches where the envelope lies above f
  std::vector<std::size_t> hull;  // grid indices of hull vertices

  // Envelope value at x by interpolation between hull vertices.
  double operator()(double x) const;
  // Lifted segment strictly containing x, if any.
  std::optional<Segment> segment_containing(double x) const;
};

// Upper concave envelope of f on [a, b] via the monotone-chain upper hull.
EnvelopeResult concave_envelope(const Fn& f, double a, double b, const EnvelopeOptions& opt = {});
// Lower convex minorant (the concave envelope of -f, negated).
EnvelopeResult convex_minorant(const Fn& f, double a, double b, const EnvelopeOptions& opt = {});

// Concave envelope taken separately on [0, kink] and [kink, 1].
class LocalConcavification {
 public:
  LocalConcavification(Fn f, double kink, std::size_t grid_n = 2001);
  // max(f(x), chord of the lifted segment containing x).
  double operator()(double x) const;
  std::optional<Segment> lifted_segment(double x) const;
  const EnvelopeResult& left() const { return left_; }
  const EnvelopeResult& right() const { return right_; }

 private:
  Fn f_;
  double kink_;
  EnvelopeResult left_;
  EnvelopeResult right_;
};

enum class SlopeDirection { Maximize, Minimize };

struct TangencyResult {
  double touch_point = 0.0;
  double slope = 0.0;
  bool valid = false;
};

// Extremal chord slope from (x0, y0) to (t, f(t)) over t in [lo, hi].
// With the anchor left of the interval, maximizing gives the upper tangent;
// with the anchor to the right, minimizing does. Ties go to the largest t.
// For concave f the slope is unimodal and golden-section is used, polished
// with the first-order condition when df is supplied; otherwise a grid scan
// locates the best cell first.
TangencyResult tangent_from_point(const Fn& f, double x0, double y0, double lo, double hi,
                                  SlopeDirection dir, bool concave = true,
                                  const Fn& df = nullptr);

// Root of f - g on [a, b]; nullopt when the endpoints do not bracket.
std::optional<double> chord_crossing(const Fn& f, const Fn& g, double a, double b);

}  // namespace persuade::envelope
