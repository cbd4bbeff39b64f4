#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace persuade::numeric {

using Fn = std::function<double(double)>;

// Root of f on [a, b] by bisection. Requires f(a) and f(b) of opposite sign
// (or one of them zero); returns nullopt otherwise.
std::optional<double> bisect(const Fn& f, double a, double b, double xtol = 1e-15);

// Largest x in [a, b] with pred(x) true, assuming pred(a) is true and pred
// switches to false at most once. pred(b) true returns b.
double last_true(const std::function<bool(double)>& pred, double a, double b,
                 double xtol = 1e-15);

struct Extremum {
  double x;
  double value;
};

// Golden-section maximization of a unimodal function on [a, b].
Extremum golden_max(const Fn& f, double a, double b, double xtol = 1e-13);

std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace persuade::numeric
