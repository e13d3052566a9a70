#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "poslab/errors.hpp"
#include "poslab/kato.hpp"

using namespace poslab;
using doctest::Approx;

TEST_CASE("H_eps values") {
    CHECK(h_epsilon(0.0, 1.0) == Approx(0.5));
    CHECK(h_epsilon(-1.0, 0.25) == Approx((-1.0 + std::sqrt(1.25)) / 2.0).epsilon(1e-15));
    CHECK(h_epsilon(-1.0, 0.25) == Approx(0.0590).epsilon(1e-3));
    CHECK_THROWS_AS(h_epsilon(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(h_epsilon_prime(1.0, -1.0), InvalidArgument);
    // no cancellation for large negative t: H ~ eps / (4 |t|)
    CHECK(h_epsilon(-1e8, 1.0) == Approx(0.25e-8).epsilon(1e-12));
    CHECK(h_epsilon_prime(-1e8, 1.0) == Approx(0.25e-16).epsilon(1e-10));
}

TEST_CASE("sup |H_eps - t_+| = sqrt(eps)/2, attained at t = 0") {
    for (double eps : {1.0, 0.01}) {
        double sup = 0.0;
        for (int k = -200000; k <= 200000; ++k) {
            const double t = k * 1e-4;
            sup = std::max(sup, std::abs(h_epsilon(t, eps) - std::max(t, 0.0)));
        }
        CHECK(sup == Approx(std::sqrt(eps) / 2.0).epsilon(1e-14));
    }
}

TEST_CASE("H_eps' is the derivative and lies in (0, 1)") {
    for (double eps : {1.0, 1e-2, 1e-6}) {
        for (double t = -3.0; t <= 3.0; t += 0.37) {
            const double d = 1e-6 * std::max(1.0, std::abs(t));
            const double fd = (h_epsilon(t + d, eps) - h_epsilon(t - d, eps)) / (2.0 * d);
            CHECK(h_epsilon_prime(t, eps) == Approx(fd).epsilon(1e-5).scale(1e-3));
            CHECK(h_epsilon_prime(t, eps) > 0.0);
            CHECK(h_epsilon_prime(t, eps) < 1.0);
        }
    }
}

TEST_CASE("nonnegative input: output equals input") {
    auto g = fixture::euclid3(2.0, 201);
    const auto l = schrodinger(g, 1.0);
    const auto rep = brezis_kato_check(fixture::sinhc(g), l, {0.0, 2.0});
    CHECK(rep.pass());
    REQUIRE(rep.output.pairings.size() == rep.input.pairings.size());
    for (std::size_t q = 0; q < rep.input.pairings.size(); ++q) CHECK(rep.output.pairings[q] == rep.input.pairings[q]);
}

TEST_CASE("sign-changing sinh r / r - c") {
    auto g = fixture::euclid3(2.0, 401);
    const auto l = schrodinger(g, 1.0);
    const double c = 1.1;
    const auto u = fixture::sinhc(g) + (-c);
    REQUIRE(u.min() < 0.0);
    REQUIRE(u.max() > 0.0);
    const auto rep = brezis_kato_check(u, l, {0.0, 2.0});
    CHECK(rep.input.pass);
    CHECK(rep.output.pass);
    CHECK(rep.pass());

    // brute-force pairing of u_+ at the node just past the zero crossing
    std::size_t cross = 0;
    while (u[cross] < 0.0) ++cross;
    const double ref = oracle::pairing(u.positive_part(), oracle::hat(g, cross), l);
    const auto it = std::find(rep.output.nodes.begin(), rep.output.nodes.end(), cross);
    REQUIRE(it != rep.output.nodes.end());
    const double got = rep.output.pairings[static_cast<std::size_t>(it - rep.output.nodes.begin())];
    CHECK(got == Approx(ref).epsilon(1e-10));
    CHECK(got > 0.0);

    // ladder: envelope, derivative bound, convergence of the pairing minima
    double prev_gap = std::numeric_limits<double>::infinity();
    for (const auto& row : rep.ladder) {
        CHECK(row.certificate.pass);
        CHECK(row.range_deviation == Approx(row.envelope).epsilon(0.1));
        CHECK(row.nodal_deviation <= row.envelope * (1.0 + 1e-12));
        CHECK(row.max_prime <= 1.0);
        const double gap = std::abs(row.certificate.min_pairing - rep.output.min_pairing);
        CHECK(gap <= prev_gap * (1.0 + 1e-9));
        prev_gap = gap;
    }
}

TEST_CASE("kink: u_+ vanishes and all pairings are zero") {
    auto g = fixture::euclid3(3.0, 301);
    const auto rep = brezis_kato_check(fixture::kink(g), laplacian(g), {0.0, 3.0});
    CHECK(rep.pass());
    for (double p : rep.output.pairings) CHECK(p == 0.0);
}

TEST_CASE("uncertified input is refused") {
    auto g = fixture::euclid3(2.0, 201);
    const auto bad = GridFunction::sample(g, [](double r) { return -r * r; });
    CHECK_THROWS_AS(brezis_kato_check(bad, laplacian(g), {0.0, 2.0}), PreconditionError);
    CHECK_THROWS_AS(kato_via_appendix(bad, laplacian(g), {0.0, 2.0}), PreconditionError);
}

TEST_CASE("appendix route with lambda = 0 reduces to smoothing") {
    auto g = fixture::euclid3(3.0, 601);
    const auto rep = kato_via_appendix(fixture::kink(g) + 0.5, laplacian(g), {0.5, 2.5});
    REQUIRE(rep.dirichlet_g.has_value());
    CHECK(rep.dirichlet_g->max_abs() == 0.0);
    CHECK(rep.pass());
    CHECK(rep.route == KatoRoute::appendix);
}

TEST_CASE("appendix route agrees with the regularization route") {
    auto g = fixture::euclid3(2.0, 401);
    const auto l = schrodinger(g, 1.0);
    const auto u = fixture::sinhc(g) + (-1.1);
    const auto a = brezis_kato_check(u, l, {0.0, 2.0});
    const auto b = kato_via_appendix(u, l, {0.0, 2.0});
    CHECK(a.pass());
    CHECK(b.pass());
    CHECK(b.agreement);
    CHECK(b.agreement_gap <= b.agreement_budget);
    CHECK(b.ancona.size() == 4);
    // g solves Delta g = u with zero boundary values
    CHECK(b.dirichlet_residual < 1e-10);
}

TEST_CASE("u = -1 with lambda = 1: empty indicator set") {
    auto g = fixture::euclid3(2.0, 201);
    const auto l = schrodinger(g, 1.0);
    const auto rep = kato_via_appendix(GridFunction::constant(g, -1.0), l, {0.0, 2.0});
    CHECK(rep.pass());
    for (const auto& row : rep.ancona) {
        for (double p : row.certificate.pairings) CHECK(std::abs(p) < 1e-12);
    }
    for (double p : rep.output.pairings) CHECK(p == 0.0);
}
