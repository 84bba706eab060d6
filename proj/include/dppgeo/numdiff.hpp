#pragma once

#include <cmath>
#include <utility>

#include "dppgeo/linalg.hpp"

namespace dppgeo::numdiff {

/// First derivative of a vector-valued function along one coordinate,
/// central differences at h and h/2 combined by Richardson extrapolation.
/// `f(t)` evaluates the function at offset t along that coordinate.
template <class F>
Vector richardson_first(F&& f, double h) {
  auto central = [&](double step) -> Vector { return (f(step) - f(-step)) / (2.0 * step); };
  const Vector coarse = central(h);
  const Vector fine = central(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

/// Mixed second derivative d^2 f / ds dt through the four-point stencil,
/// Richardson-extrapolated. `f(s, t)` evaluates at offsets (s, t).
template <class F>
Vector richardson_mixed(F&& f, double hs, double ht) {
  auto stencil = [&](double a, double b) -> Vector {
    return (f(a, b) - f(a, -b) - f(-a, b) + f(-a, -b)) / (4.0 * a * b);
  };
  const Vector coarse = stencil(hs, ht);
  const Vector fine = stencil(0.5 * hs, 0.5 * ht);
  return (4.0 * fine - coarse) / 3.0;
}

/// Pure second derivative d^2 f / dt^2, Richardson-extrapolated.
template <class F>
Vector richardson_second(F&& f, double h) {
  const Vector center = f(0.0);
  auto stencil = [&](double step) -> Vector {
    return (f(step) - 2.0 * center + f(-step)) / (step * step);
  };
  const Vector coarse = stencil(h);
  const Vector fine = stencil(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace dppgeo::numdiff
