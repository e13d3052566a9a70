#include "poslab/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poslab/errors.hpp"

namespace poslab {

DiscreteOperator weighted_laplacian(const GridFunction& alpha, const DiscreteOperator& l) {
    if (!same_grid(*alpha.grid(), *l.grid())) throw InvalidArgument("alpha and operator grids differ");
    const std::size_t n = l.size();
    std::vector<double> w(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) w[i] = alpha[i] * alpha[i + 1] * l.conduction(i);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(alpha[i] > 0.0)) throw InvalidArgument("alpha must be positive");
        m[i] = alpha[i] * alpha[i] * l.mass(i);
    }
    return {l.grid(), std::move(w), std::move(m), std::vector<double>(n, 0.0), l.left(), l.right()};
}

GroundState solve_dirichlet_ground(const DiscreteOperator& l, Interval omega, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("ground state boundary value must be positive");
    for (double lam : l.potentials()) {
        if (lam < 0.0) throw InvalidArgument("ground state needs lambda >= 0");
    }
    const GridPtr window = RadialGrid::window(l.grid(), omega);
    DiscreteOperator lw = l.restricted(window);
    GridFunction alpha = lw.has_potential()
                             ? solve_dirichlet(lw, GridFunction::constant(window, 0.0), c, c)
                             : GridFunction::constant(window, c);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (!(alpha[i] > 0.0)) {
            throw NumericalError("ground state not positive at r = " + std::to_string(window->node(i)) +
                                 " (grid too coarse)");
        }
    }
    DiscreteOperator weighted = weighted_laplacian(alpha, lw);
    return {std::move(alpha), std::move(lw), std::move(weighted)};
}

GridFunction ground_transform(const GridFunction& u, const GroundState& gs) {
    const GridFunction r = u.on(gs.alpha.grid());
    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = r[i] / gs.alpha[i];
    return {gs.alpha.grid(), std::move(v)};
}

GridFunction transported_tolerance(const IneqCertificate& cert, const GroundState& gs) {
    const GridFunction t = cert.tolerance_field.on(gs.alpha.grid());
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = t[i] * gs.alpha[i];
    return {gs.alpha.grid(), std::move(v)};
}

PWResidual verify_pw_identity(const GroundState& gs, const GridFunction& phi_in) {
    const GridFunction phi = phi_in.on(gs.alpha.grid());
    const DiscreteOperator& l = gs.source;
    const RadialGrid& g = *l.grid();
    const bool pole = l.left() == EndCondition::pole_neumann;
    if ((!pole && phi[0] != 0.0) || phi[phi.size() - 1] != 0.0) {
        throw InvalidArgument("test function must vanish at the ends");
    }
    const GridFunction v = ground_transform(phi, gs);
    const std::size_t n = g.size();

    std::vector<double> w_mid(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = 0.5 * (gs.alpha[i] + gs.alpha[i + 1]);
        w_mid[i] = a * a * l.conduction(i);
    }
    const DiscreteOperator mid(l.grid(), std::move(w_mid),
                               {gs.weighted.masses().begin(), gs.weighted.masses().end()},
                               std::vector<double>(n, 0.0), l.left(), l.right());

    PWResidual out;
    const double h = g.spacing();
    const std::size_t first = pole ? 0 : 1;
    for (std::size_t j = first; j + 1 < n; ++j) {
        const double lphi = l.hat_pairing(phi.values(), j);
        out.strong = std::max(out.strong, std::abs(gs.alpha[j] * mid.hat_pairing(v.values(), j) /
                                                       mid.mass(j) -
                                                   lphi / l.mass(j)));
        const double lhs = gs.weighted.hat_pairing(v.values(), j);
        const double rhs = gs.alpha[j] * lphi;
        out.adjoint = std::max(out.adjoint, std::abs(lhs - rhs));
        double terms = l.potential(j) * std::abs(phi[j]) * l.mass(j);
        if (j > 0) terms += l.conduction(j - 1) * (std::abs(phi[j]) + std::abs(phi[j - 1])) / h;
        terms += l.conduction(j) * (std::abs(phi[j + 1]) + std::abs(phi[j])) / h;
        out.adjoint_scale = std::max(out.adjoint_scale, gs.alpha[j] * terms);
    }
    return out;
}

}  // namespace poslab
