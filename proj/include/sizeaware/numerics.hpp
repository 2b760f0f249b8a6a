#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sizeaware::numerics {

/// Adaptive 15/31-point Gauss-Kronrod on a finite interval.
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 20) {
    if (!(b > a)) return 0.0;
    double error = 0.0;
    // Boost compares the error on [-1, 1] with a tolerance scaled by the
    // interval width, so narrow intervals never converge; integrate on [0, 1].
    const double w = b - a;
    auto unit = [&](double s) { return w * f(a + w * s); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(unit, 0.0, 1.0, max_depth, rel_tol,
                                                                        &error);
}

}  // namespace sizeaware::numerics
