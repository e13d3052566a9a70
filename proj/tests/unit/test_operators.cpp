#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "poslab/errors.hpp"
#include "poslab/operators.hpp"

using namespace poslab;
using doctest::Approx;

namespace {

GridFunction random_function(const GridPtr& g, std::mt19937_64& rng, bool vanish_left) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(g->size());
    for (auto& x : v) x = d(rng);
    if (vanish_left) v.front() = 0.0;
    v.back() = 0.0;
    return {g, v};
}

std::vector<GridPtr> presets() {
    return {fixture::euclid3(2.0, 41), fixture::hyper2(3.0, 57),
            fixture::pole_grid(WarpingProfile::superexp(1.0), 2, 2.0, 64),
            make_model(WarpingProfile::euclidean(), 3, {0.1, 1.0, LeftEnd::open, RightEnd::boundary}, 33).second,
            make_model(WarpingProfile::flat(), 1, {-1.0, 1.0, LeftEnd::open, RightEnd::boundary}, 40).second};
}

}  // namespace

TEST_CASE("laplacian of r^2 on euclidean n=3 is 6") {
    auto g = fixture::euclid3(1.0, 101);
    const auto u = GridFunction::sample(g, [](double r) { return r * r; });
    const auto au = laplacian(g).apply(u);
    CHECK(au[50] == Approx(6.0).epsilon(1e-10));
    CHECK(au[0] == Approx(6.0).epsilon(1e-12));
    CHECK(au[1] == Approx(6.0).epsilon(1e-12));
}

TEST_CASE("constants are harmonic exactly") {
    for (const auto& g : presets()) {
        const auto au = laplacian(g).apply(GridFunction::constant(g, 3.7));
        for (std::size_t i = 0; i < g->size(); ++i) CHECK(au[i] == 0.0);
    }
}

TEST_CASE("Delta(sinh r / r) = sinh r / r at second order") {
    std::vector<double> errs;
    for (std::size_t n : {101, 201, 401, 801}) {
        auto g = fixture::euclid3(2.0, n);
        const auto u = fixture::sinhc(g);
        const auto au = laplacian(g).apply(u);
        double e = 0.0;
        for (std::size_t i = 0; i + 1 < g->size(); ++i) e = std::max(e, std::abs(au[i] - u[i]));
        errs.push_back(e);
    }
    CHECK(oracle::rate(errs) >= 1.9);
}

TEST_CASE("hyperbolic consistency against the symbolic radial Laplacian") {
    // u = cosh r: Delta u = cosh r + coth r sinh r = cosh r + cosh r
    std::vector<double> errs;
    for (std::size_t n : {101, 201, 401}) {
        auto g = fixture::hyper2(3.0, n);
        const auto au = laplacian(g).apply(GridFunction::sample(g, [](double r) { return std::cosh(r); }));
        double e = 0.0;
        for (std::size_t i = 1; i + 1 < g->size(); ++i) {
            const double r = g->node(i);
            const double ref = oracle::radial_laplacian(std::sinh(r), std::cosh(r), 2, std::cosh(r) / std::sinh(r));
            e = std::max(e, std::abs(au[i] - ref));
        }
        errs.push_back(e);
    }
    CHECK(oracle::rate(errs) >= 1.9);
}

TEST_CASE("schrodinger") {
    auto g = fixture::euclid3(2.0, 201);
    const auto one = GridFunction::constant(g, 1.0);
    const auto lu = schrodinger(g, 1.0).apply(one);
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(lu[i] == Approx(-1.0));

    const auto u = fixture::sinhc(g);
    const auto r = schrodinger(g, 1.0).apply(u);
    for (std::size_t i = 0; i + 1 < g->size(); ++i) CHECK(std::abs(r[i]) < 1e-4);

    const auto a = schrodinger(g, 0.0).apply(u);
    const auto b = laplacian(g).apply(u);
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(a[i] == b[i]);

    CHECK_THROWS_AS(schrodinger(g, -0.5), InvalidArgument);
    CHECK_THROWS_AS(schrodinger(g, [](double x) { return x - 1.0; }), InvalidArgument);
}

TEST_CASE("distributional and weak pairings agree to machine precision") {
    std::mt19937_64 rng(20240611);
    for (const auto& g : presets()) {
        const bool pole = g->manifold().has_pole();
        for (const auto& a : {laplacian(g), schrodinger(g, 1.0)}) {
            double worst = 0.0;
            for (int trial = 0; trial < 100; ++trial) {
                const auto u = random_function(g, rng, false);
                const auto phi = random_function(g, rng, !pole);
                const double d = pair_distributional(u, phi, a);
                const double w = weak_form_pair(u, phi, a);
                const double ref = oracle::pairing(u, phi, a);
                const double scale = std::abs(ref) + 1e-300;
                worst = std::max(worst, std::abs(d - w) / scale);
                CHECK(d == Approx(ref).epsilon(1e-11));
            }
            CHECK(worst < 1e-12);
        }
    }
}

TEST_CASE("pairings reject test functions that do not vanish at the ends") {
    auto g = fixture::euclid3(1.0, 21);
    const auto one = GridFunction::constant(g, 1.0);
    CHECK_THROWS_AS(pair_distributional(one, one, laplacian(g)), InvalidArgument);
    CHECK_THROWS_AS(weak_form_pair(one, one, laplacian(g)), InvalidArgument);
}

TEST_CASE("hat against itself") {
    auto g = fixture::hyper2(2.0, 41);
    const auto a = laplacian(g);
    for (std::size_t j : {3, 17, 30}) {
        const auto e = oracle::hat(g, j);
        const double expect = -(g->half_density(j - 1) + g->half_density(j)) / g->spacing();
        CHECK(pair_distributional(e, e, a) == Approx(expect).epsilon(1e-14));
        CHECK(weak_form_pair(e, e, a) == Approx(expect).epsilon(1e-14));
    }
    // u = 1 pairs to zero with any test function
    const auto one = GridFunction::constant(g, 1.0);
    CHECK(std::abs(pair_distributional(one, oracle::hat(g, 9), a)) < 1e-12);
    CHECK(weak_form_pair(one, oracle::hat(g, 9), a) == 0.0);
}

TEST_CASE("kink pairing at r = 1 carries the jump of u'") {
    auto g = fixture::euclid3(2.0, 2001);
    const auto u = fixture::kink(g);
    const std::size_t j = 1000;
    REQUIRE(g->node(j) == Approx(1.0));
    // brute-force sum over the whole grid with the dense oracle
    const double pairing = oracle::pairing(u, oracle::hat(g, j), laplacian(g));
    CHECK(pairing > 0.0);
    CHECK(pairing == Approx(4.0 * oracle::pi).epsilon(2e-3));
    CHECK(pair_distributional(u, oracle::hat(g, j), laplacian(g)) == Approx(pairing).epsilon(1e-12));
}

TEST_CASE("check_subsolution examples") {
    auto g = fixture::euclid3(2.0, 401);
    const auto l = schrodinger(g, 1.0);
    CHECK(check_subsolution(fixture::sinhc(g), l).pass);

    for (const auto& h : {fixture::euclid3(2.0, 101), fixture::hyper2(4.0, 201)}) {
        const auto c = check_subsolution(GridFunction::sample(h, [](double r) { return -r * r; }), laplacian(h));
        CHECK_FALSE(c.pass);
        CHECK(c.worst_node > 0);
        CHECK(c.worst_node + 1 < h->size());
        // Delta(-r^2) = -2n at the pole: pairing -2n m_0
        CHECK(c.pairings[0] == Approx(-2.0 * h->manifold().dimension() * h->control_mass(0)).epsilon(1e-3));
    }

    const auto k = check_subsolution(fixture::kink(g), laplacian(g));
    CHECK(k.pass);
    const auto kink_node = static_cast<std::size_t>(std::find(k.nodes.begin(), k.nodes.end(), 200) - k.nodes.begin());
    REQUIRE(kink_node < k.nodes.size());
    CHECK(k.pairings[kink_node] > 1.0);
}

TEST_CASE("certificate is scale invariant and monotone in tolerance") {
    auto g = fixture::hyper2(3.0, 151);
    const auto u = GridFunction::sample(g, [](double r) { return std::cos(r); });
    const auto l = laplacian(g);
    CertificateOptions zero;
    zero.absolute = 0.0;
    const auto base = check_subsolution(u, l, zero);
    for (double s : {1e-3, 2.0, 1e5}) {
        const auto c = check_subsolution(s * u, l, zero);
        CHECK(c.pass == base.pass);
        CHECK(c.min_pairing == Approx(s * base.min_pairing).epsilon(1e-12));
        CHECK(c.worst_node == base.worst_node);
    }
    bool prev = false;
    for (double tol : {0.0, 1e-4, 1e-2, 1.0, 1e3}) {
        CertificateOptions o;
        o.absolute = tol;
        const bool pass = check_subsolution(u, l, o).pass;
        CHECK((!prev || pass));
        prev = pass;
    }
    CHECK(prev);
}

TEST_CASE("certificates on overlapping intervals decompose the union") {
    auto g = fixture::euclid3(3.0, 301);
    const auto u = fixture::kink(g);
    const auto l = laplacian(g);
    const auto a = check_subsolution(u, l, Interval{0.0, 2.0});
    const auto b = check_subsolution(u, l, Interval{1.0, 3.0});
    const auto c = check_subsolution(u, l, Interval{0.0, 3.0});
    CHECK((a.pass && b.pass) == c.pass);
    CHECK(std::min(a.min_pairing, b.min_pairing) == Approx(c.min_pairing));
}

TEST_CASE("norms") {
    auto g = fixture::euclid3(1.0, 2001);
    CHECK(lp_norm(GridFunction::constant(g, 1.0), 2.0) == Approx(std::sqrt(4.0 * oracle::pi / 3.0)).epsilon(1e-5));
    CHECK(w12_seminorm(GridFunction::constant(g, 2.0), Interval{0.0, 1.0}) == 0.0);
    CHECK_THROWS_AS(lp_norm(GridFunction::constant(g, 1.0), 0.5), InvalidArgument);

    // punctured ball: int_0^1 4 pi r^2 (e^-r / r)^2 dr
    auto p = make_model(WarpingProfile::euclidean(), 3, {1e-3, 1.0, LeftEnd::open, RightEnd::truncation}, 100000)
                 .second;
    const auto u = GridFunction::sample(p, [](double r) { return -std::exp(-r) / r; });
    const double ref = oracle::integrate([](double r) { return 4.0 * oracle::pi * std::exp(-2.0 * r); }, 0.0, 1.0);
    CHECK(ref == Approx(2.0 * oracle::pi * (1.0 - std::exp(-2.0))));
    CHECK(lp_norm(u, 2.0) == Approx(std::sqrt(ref)).epsilon(0.01));

    // seminorm of r on B_1: int 4 pi r^2 dr
    const auto r = GridFunction::sample(g, [](double x) { return x; });
    CHECK(w12_seminorm(r, Interval{0.0, 1.0}) == Approx(std::sqrt(4.0 * oracle::pi / 3.0)).epsilon(1e-5));
}

TEST_CASE("spectral bottom") {
    auto g = make_model(WarpingProfile::flat(), 1, {0.0, oracle::pi, LeftEnd::open, RightEnd::boundary}, 1001).second;
    const double h = g->spacing();
    const double lam = spectral_bottom(laplacian(g), {0.0, oracle::pi});
    // discrete eigenvalue of the three-point Laplacian
    const double discrete = 4.0 / (h * h) * std::pow(std::sin(h / 2.0), 2);
    CHECK(lam == Approx(discrete).epsilon(1e-8));
    CHECK(lam == Approx(1.0).epsilon(1e-5));
    CHECK(spectral_bottom(schrodinger(g, 1.0), {0.0, oracle::pi}) == Approx(2.0).epsilon(1e-5));
    const double half = spectral_bottom(laplacian(g), {0.0, oracle::pi / 2.0});
    CHECK(half == Approx(4.0).epsilon(1e-4));
    CHECK(half > lam);
    CHECK(spectral_bottom(laplacian(g), {0.0, oracle::pi}, -0.25) == Approx(lam - 0.25).epsilon(1e-8));
}

TEST_CASE("spectral bottom matches a dense eigen solve and decreases with the domain") {
    auto g = fixture::hyper2(4.0, 161);
    const auto l = schrodinger(g, 1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double R : {1.0, 2.0, 3.0, 4.0}) {
        const double lam = spectral_bottom(l, {0.0, R});
        CHECK(lam <= prev);
        prev = lam;
        // dense generalized problem K v = lam M v on the unknowns [0, last)
        const auto [first, last] = g->node_range({0.0, R});
        const auto k = oracle::dense_flux_matrix(l);
        const auto n = static_cast<Eigen::Index>(last - first);
        Eigen::MatrixXd a(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double mi = std::sqrt(l.mass(static_cast<std::size_t>(i)));
                const double mj = std::sqrt(l.mass(static_cast<std::size_t>(j)));
                a(i, j) = -k(i, j) / (mi * mj);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        CHECK(lam == Approx(es.eigenvalues()(0)).epsilon(1e-8));
    }
}

TEST_CASE("resolvent positivity") {
    for (const auto& g : {fixture::euclid3(10.0, 200), fixture::hyper2(10.0, 200)}) {
        const auto rep = resolvent_positivity(g);
        CHECK(rep.pass);
        CHECK(rep.sign_pattern);
        CHECK(rep.min_entry >= 0.0);
        // dense inverse of -K + M
        const auto l = schrodinger(g, 1.0);
        const Eigen::MatrixXd inv = (-oracle::dense_flux_matrix(l)).inverse();
        Eigen::MatrixXd gmat = inv;
        for (Eigen::Index c = 0; c < gmat.cols(); ++c) gmat.col(c) *= l.mass(static_cast<std::size_t>(c));
        CHECK(rep.min_entry == Approx(gmat.minCoeff()).epsilon(1e-6));
    }
    const auto bad = resolvent_positivity(fixture::euclid3(10.0, 200), -1.0);
    CHECK_FALSE(bad.pass);
    CHECK(bad.min_entry < 0.0);
}

TEST_CASE("solve_dirichlet") {
    auto g = make_model(WarpingProfile::flat(), 1, {-1.0, 1.0, LeftEnd::open, RightEnd::boundary}, 201).second;
    const auto l = schrodinger(g, 1.0);
    const auto u = solve_dirichlet(l, GridFunction::constant(g, 0.0), std::cosh(1.0), std::cosh(1.0));
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(u[i] == Approx(std::cosh(g->node(i))).epsilon(1e-4));
    CHECK(solve_dirichlet(l, GridFunction::constant(g, 0.0), 0.0, 0.0).max_abs() == 0.0);
}
