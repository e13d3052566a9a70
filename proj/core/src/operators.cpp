#include "poslab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "poslab/errors.hpp"

namespace poslab {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Interval whole(const RadialGrid& g) { return {g.node(0), g.node(g.size() - 1)}; }

void require_same(const GridFunction& u, const DiscreteOperator& a) {
    if (!same_grid(*u.grid(), *a.grid())) {
        throw InvalidArgument("grid function and operator live on different grids");
    }
}

void require_test_function(const GridFunction& phi, const DiscreteOperator& a) {
    require_same(phi, a);
    const bool pole_left = a.left() == EndCondition::pole_neumann;
    if ((!pole_left && phi[0] != 0.0) || phi[phi.size() - 1] != 0.0) {
        throw InvalidArgument("test function must vanish at the ends");
    }
}

}  // namespace

DiscreteOperator::DiscreteOperator(GridPtr grid, std::vector<double> conduction,
                                   std::vector<double> mass, std::vector<double> potential,
                                   EndCondition left, EndCondition right)
    : grid_(std::move(grid)),
      w_(std::move(conduction)),
      mass_(std::move(mass)),
      lambda_(std::move(potential)),
      left_(left),
      right_(right) {
    if (!grid_) throw InvalidArgument("operator without a grid");
    const std::size_t n = grid_->size();
    if (w_.size() + 1 != n || mass_.size() != n || lambda_.size() != n) {
        throw InvalidArgument("operator coefficient sizes do not match the grid");
    }
    for (double w : w_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("conduction must be positive");
    }
    for (double m : mass_) {
        if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("control mass must be positive");
    }
    for (double l : lambda_) {
        if (!std::isfinite(l)) throw InvalidArgument("zero-order coefficient is not finite");
    }
}

bool DiscreteOperator::has_potential() const {
    return std::any_of(lambda_.begin(), lambda_.end(), [](double l) { return l != 0.0; });
}

double DiscreteOperator::flux_difference(std::span<const double> u, std::size_t j) const {
    const double h = grid_->spacing();
    double out = 0.0;
    if (j + 1 < u.size()) out += w_[j] * (u[j + 1] - u[j]) / h;
    if (j > 0) out -= w_[j - 1] * (u[j] - u[j - 1]) / h;
    return out;
}

double DiscreteOperator::hat_pairing(std::span<const double> u, std::size_t j) const {
    return flux_difference(u, j) - lambda_[j] * u[j] * mass_[j];
}

GridFunction DiscreteOperator::apply(const GridFunction& u) const {
    require_same(u, *this);
    std::vector<double> out(u.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = hat_pairing(u.values(), j) / mass_[j];
    return {grid_, std::move(out)};
}

DiscreteOperator DiscreteOperator::restricted(const GridPtr& window) const {
    if (!window || window->root() != grid_->root()) {
        throw InvalidArgument("window is not cut from the operator's grid");
    }
    const std::size_t lo = grid_->root_offset();
    const std::size_t first = window->root_offset();
    if (first < lo || first + window->size() > lo + size()) {
        throw InvalidArgument("window leaves the operator's grid");
    }
    const std::size_t off = first - lo;
    const std::size_t n = window->size();
    std::vector<double> w(w_.begin() + off, w_.begin() + off + n - 1);
    std::vector<double> lam(lambda_.begin() + off, lambda_.begin() + off + n);
    // Interior control masses are inherited; the window ends get half cells.
    std::vector<double> m(mass_.begin() + off, mass_.begin() + off + n);
    m.front() *= window->control_mass(0) / grid_->control_mass(off);
    m.back() *= window->control_mass(n - 1) / grid_->control_mass(off + n - 1);
    const bool keeps_pole = off == 0 && left_ == EndCondition::pole_neumann;
    return {window, std::move(w), std::move(m), std::move(lam),
            keeps_pole ? EndCondition::pole_neumann : EndCondition::dirichlet, EndCondition::dirichlet};
}

DiscreteOperator DiscreteOperator::with_potential(std::vector<double> potential) const {
    return {grid_, w_, mass_, std::move(potential), left_, right_};
}

Tridiagonal DiscreteOperator::stiffness(std::size_t first, std::size_t last) const {
    if (last < first || last >= size()) throw InvalidArgument("stiffness: bad node range");
    const double h = grid_->spacing();
    const std::size_t n = last - first + 1;
    Tridiagonal k;
    k.diag.resize(n);
    k.lower.resize(n - 1);
    k.upper.resize(n - 1);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = first + r;
        double d = lambda_[i] * mass_[i];
        if (i > 0) d += w_[i - 1] / h;
        if (i + 1 < size()) d += w_[i] / h;
        k.diag[r] = d;
        if (r + 1 < n) {
            k.upper[r] = -w_[i] / h;
            k.lower[r] = -w_[i] / h;
        }
    }
    return k;
}

std::pair<EndCondition, EndCondition> end_conditions(const ModelManifold& m) {
    const EndCondition left = m.has_pole() ? EndCondition::pole_neumann : EndCondition::dirichlet;
    const EndCondition right =
        m.right() == RightEnd::truncation ? EndCondition::natural : EndCondition::dirichlet;
    return {left, right};
}

DiscreteOperator laplacian(const GridPtr& grid) {
    return schrodinger(grid, std::vector<double>(grid->size(), 0.0));
}

DiscreteOperator schrodinger(const GridPtr& grid, double lambda) {
    return schrodinger(grid, std::vector<double>(grid->size(), lambda));
}

DiscreteOperator schrodinger(const GridPtr& grid, const std::function<double(double)>& lambda) {
    std::vector<double> l(grid->size());
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = lambda(grid->node(i));
    return schrodinger(grid, std::move(l));
}

DiscreteOperator schrodinger(const GridPtr& grid, std::vector<double> lambda) {
    for (double l : lambda) {
        if (!(l >= 0.0) || !std::isfinite(l)) {
            throw InvalidArgument("zero-order coefficient must be nonnegative (use spectral_bottom for lambda < 0)");
        }
    }
    const auto [left, right] = end_conditions(grid->manifold());
    const auto w = grid->half_densities();
    const auto m = grid->control_masses();
    return {grid, {w.begin(), w.end()}, {m.begin(), m.end()}, std::move(lambda), left, right};
}

double pair_distributional(const GridFunction& u, const GridFunction& phi, const DiscreteOperator& a) {
    require_same(u, a);
    require_test_function(phi, a);
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * a.hat_pairing(phi.values(), i);
    return sum;
}

double weak_form_pair(const GridFunction& u, const GridFunction& phi, const DiscreteOperator& a) {
    require_same(u, a);
    require_test_function(phi, a);
    const double h = a.grid()->spacing();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        sum -= a.conduction(i) * (u[i + 1] - u[i]) * (phi[i + 1] - phi[i]) / h;
    }
    for (std::size_t i = 0; i < u.size(); ++i) sum -= a.potential(i) * u[i] * phi[i] * a.mass(i);
    return sum;
}

std::vector<std::size_t> hat_nodes(const RadialGrid& grid, Interval region) {
    const auto [first, last] = grid.node_range(region);
    std::vector<std::size_t> nodes;
    if (first == 0 && grid.manifold().has_pole()) nodes.push_back(0);
    for (std::size_t j = first + 1; j < last; ++j) nodes.push_back(j);
    return nodes;
}

std::vector<double> certificate_tolerances(const GridFunction& u, const DiscreteOperator& a,
                                           std::span<const std::size_t> nodes,
                                           const CertificateOptions& options) {
    const RadialGrid& g = *a.grid();
    const double h = g.spacing();
    std::vector<double> tol(nodes.size());
    if (options.absolute) {
        std::fill(tol.begin(), tol.end(), *options.absolute);
        return tol;
    }
    std::optional<GridFunction> inherited;
    if (options.node_tolerance) inherited = options.node_tolerance->on(a.grid());

    double scale = 0.0;
    if (!nodes.empty()) {
        const std::size_t lo = nodes.front() == 0 ? 0 : nodes.front() - 1;
        const std::size_t hi = nodes.back() + 1;
        for (std::size_t i = lo; i <= hi && i < u.size(); ++i) scale = std::max(scale, std::abs(u[i]));
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const std::size_t j = nodes[k];
        double round = a.potential(j) * std::abs(u[j]) * a.mass(j);
        if (j + 1 < u.size()) round += a.conduction(j) * (std::abs(u[j + 1]) + std::abs(u[j])) / h;
        if (j > 0) round += a.conduction(j - 1) * (std::abs(u[j]) + std::abs(u[j - 1])) / h;
        round *= 64.0 * kEps;
        const double model = inherited ? (*inherited)[j] : options.c * h * h * a.mass(j) * scale;
        tol[k] = model + round;
    }
    return tol;
}

IneqCertificate make_certificate(const GridPtr& grid, std::vector<std::size_t> nodes,
                                 std::vector<double> pairings, std::vector<double> tolerances) {
    IneqCertificate c;
    c.hats_tested = nodes.size();
    std::vector<double> field(grid->size(), 0.0);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        field[nodes[k]] = tolerances[k];
        const double slack = pairings[k] + tolerances[k];
        if (slack < worst) {
            worst = slack;
            c.min_pairing = pairings[k];
            c.tolerance = tolerances[k];
            c.worst_node = nodes[k];
            c.worst_radius = grid->node(nodes[k]);
        }
    }
    c.pass = nodes.empty() || c.min_pairing >= -c.tolerance;
    c.nodes = std::move(nodes);
    c.pairings = std::move(pairings);
    c.tolerances = std::move(tolerances);
    c.tolerance_field = GridFunction(grid, std::move(field));
    return c;
}

IneqCertificate check_subsolution(const GridFunction& u, const DiscreteOperator& a, Interval region,
                                  const CertificateOptions& options) {
    require_same(u, a);
    auto nodes = hat_nodes(*a.grid(), region);
    auto tol = certificate_tolerances(u, a, nodes, options);
    std::vector<double> pair(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) pair[k] = a.hat_pairing(u.values(), nodes[k]);
    return make_certificate(a.grid(), std::move(nodes), std::move(pair), std::move(tol));
}

IneqCertificate check_subsolution(const GridFunction& u, const DiscreteOperator& a,
                                  const CertificateOptions& options) {
    return check_subsolution(u, a, whole(*a.grid()), options);
}

double lp_norm(const GridFunction& u, double p, Interval region) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("lp_norm needs 1 <= p < inf");
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(std::abs(u[i]), p);
    return std::pow(u.grid()->integrate(f, region), 1.0 / p);
}

double lp_norm(const GridFunction& u, double p) { return lp_norm(u, p, whole(*u.grid())); }

namespace {
double seminorm(const GridFunction& u, std::span<const double> w, Interval region) {
    const RadialGrid& g = *u.grid();
    const auto [first, last] = g.node_range(region);
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double d = (u[i + 1] - u[i]) / g.spacing();
        sum += w[i] * d * d * g.spacing();
    }
    return std::sqrt(sum);
}
}  // namespace

double w12_seminorm(const GridFunction& u, Interval region) {
    return seminorm(u, u.grid()->half_densities(), region);
}

double w12_seminorm(const GridFunction& u, const DiscreteOperator& a, Interval region) {
    require_same(u, a);
    return seminorm(u, a.conductions(), region);
}

namespace {

// Number of eigenvalues of the symmetric tridiagonal (d, e) below x.
std::size_t sturm_count(std::span<const double> d, std::span<const double> e, double x) {
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double off = i > 0 ? e[i - 1] * e[i - 1] : 0.0;
        q = d[i] - x - (i > 0 ? off / q : 0.0);
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

}  // namespace

double spectral_bottom(const DiscreteOperator& a, Interval domain, double extra_potential) {
    const RadialGrid& g = *a.grid();
    const auto [first, last] = g.node_range(domain);
    const bool pole = first == 0 && a.left() == EndCondition::pole_neumann;
    const std::size_t lo = pole ? 0 : first + 1;
    const std::size_t hi = last - 1;
    if (hi < lo || hi - lo + 1 < 3) throw InvalidArgument("spectral_bottom needs at least 3 unknowns");

    Tridiagonal k = a.stiffness(lo, hi);
    const std::size_t n = k.size();
    std::vector<double> d(n), e(n - 1);
    for (std::size_t r = 0; r < n; ++r) {
        const double m = a.mass(lo + r);
        d[r] = k.diag[r] / m + extra_potential;
    }
    for (std::size_t r = 0; r + 1 < n; ++r) {
        e[r] = k.upper[r] / std::sqrt(a.mass(lo + r) * a.mass(lo + r + 1));
    }

    double lower = std::numeric_limits<double>::infinity();
    double upper = -lower;
    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double rad = (r > 0 ? std::abs(e[r - 1]) : 0.0) + (r + 1 < n ? std::abs(e[r]) : 0.0);
        lower = std::min(lower, d[r] - rad);
        upper = std::max(upper, d[r] + rad);
        scale = std::max(scale, std::abs(d[r]) + rad);
    }
    for (int it = 0; it < 200 && upper - lower > 1e-9 * std::max(1.0, std::abs(lower)); ++it) {
        const double mid = 0.5 * (lower + upper);
        if (sturm_count(d, e, mid) == 0) lower = mid; else upper = mid;
    }

    Tridiagonal b;
    const double shift = lower - 1e-8 * scale;
    b.diag.resize(n);
    for (std::size_t r = 0; r < n; ++r) b.diag[r] = d[r] - shift;
    b.lower = e;
    b.upper = e;
    const TridiagonalLU lu(b);

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double rho = std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 500; ++it) {
        auto y = lu.solve(x);
        const double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
        for (std::size_t r = 0; r < n; ++r) x[r] = y[r] / norm;
        const auto bx = b.multiply(x);
        const double next = std::inner_product(x.begin(), x.end(), bx.begin(), 0.0) + shift;
        if (std::abs(next - rho) <= 1e-14 * (std::abs(next) + scale)) return next;
        rho = next;
    }
    throw NumericalError("spectral_bottom: inverse iteration stagnated near " + std::to_string(rho));
}

ResolventReport resolvent_positivity(const GridPtr& grid, double shift) {
    const DiscreteOperator a =
        laplacian(grid).with_potential(std::vector<double>(grid->size(), shift));
    const std::size_t lo = a.left() == EndCondition::dirichlet ? 1 : 0;
    const std::size_t hi = a.right() == EndCondition::dirichlet ? grid->size() - 2 : grid->size() - 1;
    const Tridiagonal k = a.stiffness(lo, hi);
    const std::size_t n = k.size();

    ResolventReport rep;
    rep.unknowns = n;
    rep.sign_pattern = std::all_of(k.upper.begin(), k.upper.end(), [](double v) { return v <= 0.0; });
    rep.diagonally_dominant = true;
    for (std::size_t r = 0; r < n; ++r) {
        const double off = (r > 0 ? std::abs(k.lower[r - 1]) : 0.0) + (r + 1 < n ? std::abs(k.upper[r]) : 0.0);
        if (k.diag[r] < off * (1.0 - 1e-14)) rep.diagonally_dominant = false;
    }

    const TridiagonalLU lu(k);
    rep.min_entry = std::numeric_limits<double>::infinity();
    rep.max_entry = -rep.min_entry;
    std::vector<double> e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        e[c] = a.mass(lo + c);
        const auto col = lu.solve(e);
        e[c] = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (col[r] < rep.min_entry) {
                rep.min_entry = col[r];
                rep.witness_row = lo + r;
                rep.witness_col = lo + c;
            }
            rep.max_entry = std::max(rep.max_entry, col[r]);
        }
    }
    rep.pass = rep.min_entry >= -1e-14 * std::abs(rep.max_entry);
    return rep;
}

GridFunction solve_dirichlet(const DiscreteOperator& a, const GridFunction& f, double left_value,
                             double right_value) {
    require_same(f, a);
    const std::size_t n = a.size();
    const bool dl = a.left() == EndCondition::dirichlet;
    const bool dr = a.right() == EndCondition::dirichlet;
    const std::size_t lo = dl ? 1 : 0;
    const std::size_t hi = dr ? n - 2 : n - 1;
    if (hi < lo) throw InvalidArgument("solve_dirichlet: no unknowns");
    const double h = a.grid()->spacing();
    const Tridiagonal k = a.stiffness(lo, hi);
    std::vector<double> rhs(k.size());
    for (std::size_t r = 0; r < rhs.size(); ++r) rhs[r] = -a.mass(lo + r) * f[lo + r];
    if (dl) rhs.front() += a.conduction(0) / h * left_value;
    if (dr) rhs.back() += a.conduction(n - 2) / h * right_value;
    const auto x = TridiagonalLU(k).solve(rhs);
    std::vector<double> u(n);
    if (dl) u.front() = left_value;
    if (dr) u.back() = right_value;
    std::copy(x.begin(), x.end(), u.begin() + static_cast<std::ptrdiff_t>(lo));
    return {a.grid(), std::move(u)};
}

}  // namespace poslab
