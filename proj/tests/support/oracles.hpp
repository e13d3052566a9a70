#pragma once

// Reference computations for the test suites. Nothing in here calls into the
// library's numerics: quadrature is Boost.Math, linear algebra is dense Eigen,
// ODEs use a fixed-step RK4 written out below.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "poslab/operators.hpp"

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

/// For integrands with endpoint singularities.
inline double integrate_singular(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b);
}

inline double sinhc(double r) { return r == 0.0 ? 1.0 : std::sinh(r) / r; }

/// Radial Laplacian f'' + (n - 1) (sigma'/sigma) f' at r > 0.
inline double radial_laplacian(double d1, double d2, int n, double log_dsigma) {
    return d2 + (n - 1) * log_dsigma * d1;
}

/// |S^{n-1}| for n = 2, 3.
inline double sphere(int n) { return n == 2 ? 2.0 * pi : 4.0 * pi; }

/// Dense matrix of u -> m (A u) assembled from the operator's raw
/// coefficients, row by row from the flux formula.
inline Eigen::MatrixXd dense_flux_matrix(const poslab::DiscreteOperator& a) {
    const auto n = static_cast<Eigen::Index>(a.size());
    const double h = a.grid()->spacing();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double w = a.conduction(static_cast<std::size_t>(i)) / h;
        k(i, i) -= w;
        k(i, i + 1) += w;
        k(i + 1, i + 1) -= w;
        k(i + 1, i) += w;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) -= a.potential(static_cast<std::size_t>(i)) * a.mass(static_cast<std::size_t>(i));
    }
    return k;
}

inline Eigen::VectorXd vec(const poslab::GridFunction& u) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) v(static_cast<Eigen::Index>(i)) = u[i];
    return v;
}

/// sum_i u_i (A phi)_i m_i by a dense product.
inline double pairing(const poslab::GridFunction& u, const poslab::GridFunction& phi,
                      const poslab::DiscreteOperator& a) {
    return vec(u).dot(dense_flux_matrix(a) * vec(phi));
}

/// Hat function at node j.
inline poslab::GridFunction hat(const poslab::GridPtr& g, std::size_t j) {
    std::vector<double> v(g->size(), 0.0);
    v[j] = 1.0;
    return {g, v};
}

/// Flux-exact half density h / int dr / S by adaptive quadrature.
inline double half_density(const std::function<double(double)>& s, double lo, double hi) {
    return (hi - lo) / integrate([&](double r) { return 1.0 / s(r); }, lo, hi);
}

/// Triweight kernel, written out independently.
inline double triweight(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return 35.0 / 32.0 * q * q * q;
}

/// int (y - s)_+ rho(s) ds - y_+ by quadrature on the kink-free pieces.
inline double ramp_excess(double y) {
    const double hi = std::clamp(y, -1.0, 1.0);
    const double conv = hi > -1.0 ? integrate([&](double s) { return (y - s) * triweight(s); }, -1.0, hi) : 0.0;
    return conv - std::max(y, 0.0);
}

/// Radial resolvent h'' + (log S)' h' = h, h(0) = 1, through the Riccati
/// variable y = h'/h: y' = 1 - y^2 - (log S)' y, log h = int y. Series start
/// y ~ r / n. Fixed-step RK4 with `steps_per_unit` steps per unit radius.
inline std::vector<double> resolvent_log_h(const std::function<double(double)>& log_s_prime, int n,
                                           const std::vector<double>& radii, double steps_per_unit) {
    double r = 1e-4;
    double y = r / n;
    double lh = r * r / (2.0 * n);
    std::vector<double> out;
    // state (y, log h); d(log h)/dr = y
    auto f = [&](double x, double yy) { return 1.0 - yy * yy - log_s_prime(x) * yy; };
    for (double target : radii) {
        const auto steps = static_cast<std::size_t>(std::ceil((target - r) * steps_per_unit));
        const double dt = (target - r) / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s) {
            const double y1 = y;
            const double k1 = f(r, y1);
            const double y2 = y + dt / 2 * k1;
            const double k2 = f(r + dt / 2, y2);
            const double y3 = y + dt / 2 * k2;
            const double k3 = f(r + dt / 2, y3);
            const double y4 = y + dt * k3;
            const double k4 = f(r + dt, y4);
            lh += dt / 6.0 * (y1 + 2.0 * y2 + 2.0 * y3 + y4);
            y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            r += dt;
        }
        out.push_back(lh);
    }
    return out;
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// log2 convergence rate from successive errors.
inline double rate(const std::vector<double>& errors) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        x.push_back(static_cast<double>(i));
        y.push_back(std::log2(errors[i]));
    }
    return -slope(x, y);
}

}  // namespace oracle
