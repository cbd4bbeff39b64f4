#include "persuade/numeric.hpp"

#include <cmath>

namespace persuade::numeric {

std::optional<double> bisect(const Fn& f, double a, double b, double xtol) {
  double fa = f(a);
  if (fa == 0.0) return a;
  double fb = f(b);
  if (fb == 0.0) return b;
  if (std::signbit(fa) == std::signbit(fb)) return std::nullopt;
  for (int it = 0; it < 400 && b - a > xtol; ++it) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    double fm = f(m);
    if (fm == 0.0) return m;
    if (std::signbit(fm) == std::signbit(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  // Report the endpoint with the smaller residual.
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

double last_true(const std::function<bool(double)>& pred, double a, double b, double xtol) {
  if (pred(b)) return b;
  for (int it = 0; it < 400 && b - a > xtol; ++it) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (pred(m)) {
      a = m;
    } else {
      b = m;
    }
  }
  return a;
}

Extremum golden_max(const Fn& f, double a, double b, double xtol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 300 && b - a > xtol; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    }
  }
  return fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out;
  if (n == 0) return out;
  if (n == 1) return {a};
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(i + 1 == n ? b : a + t * (b - a));
  }
  return out;
}

}  // namespace persuade::numeric
