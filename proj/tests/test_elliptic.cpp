#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>

#include "dtv/elliptic.hpp"

using dtv::ExactScalar;
using dtv::Lattice;
using dtv::LaurentSeries;
using CD = std::complex<double>;

namespace {

ExactScalar q(long n, long d = 1) { return ExactScalar(mpq_class(n, d)); }

/// Independent pointwise oracle: the defining lattice sum for wp with the
/// two leading tail terms subtracted per summand and restored analytically
/// through the known series coefficients.  Error ~ |z|^6 / R^6 for
/// truncation radius R.
CD wp_lattice_sum(const Lattice<CD>& lat, CD z, int range) {
    CD w1 = (*lat.omega)[0], w2 = (*lat.omega)[1];
    CD acc = 1.0 / (z * z) + lat.g2 / 20.0 * z * z + lat.g3 / 28.0 * z * z * z * z;
    for (int m = -range; m <= range; ++m) {
        for (int n = -range; n <= range; ++n) {
            if (m == 0 && n == 0) continue;
            CD w = 2.0 * (double(m) * w1 + double(n) * w2);
            CD iw2 = 1.0 / (w * w);
            CD iw4 = iw2 * iw2;
            acc += 1.0 / ((z - w) * (z - w)) - iw2 - 3.0 * z * z * iw4 -
                   5.0 * z * z * z * z * iw4 * iw2;
        }
    }
    return acc;
}

/// Residual of the Weierstrass differential equation at a point.
double wp_ode_residual(const Lattice<CD>& lat, CD z) {
    auto [p, pp] = wp_eval_pair(lat, z);
    CD r = pp * pp - 4.0 * p * p * p + lat.g2 * p + lat.g3;
    double scale = std::max({std::abs(pp * pp), std::abs(4.0 * p * p * p), 1.0});
    return std::abs(r) / scale;
}

CD random_cell_point(std::mt19937_64& rng, const Lattice<CD>& lat) {
    std::uniform_real_distribution<double> u(-0.45, 0.45);
    CD w1 = (*lat.omega)[0], w2 = (*lat.omega)[1];
    for (;;) {
        CD z = 2.0 * (u(rng) * w1 + u(rng) * w2);
        if (std::abs(z) > 0.05 * lat.r_min) return z;
    }
}

} // namespace

TEST_CASE("roots for g2=4, g3=0 are {-1, 0, 1} in lexicographic order") {
    auto lat = dtv::lattice_from_invariants<ExactScalar>(q(4), q(0));
    CHECK(lat.e[0] == q(-1));
    CHECK(lat.e[1] == q(0));
    CHECK(lat.e[2] == q(1));
    CHECK_FALSE(lat.omega.has_value());
}

TEST_CASE("roots for g2=0, g3=4 are the cube roots of unity") {
    auto lat = dtv::lattice_from_invariants<CD>(CD(0), CD(4));
    // 4t^3 = 4: roots are 1, exp(±2πi/3)
    CHECK(std::abs(lat.e[0] - CD(-0.5, -std::sqrt(3) / 2)) < 1e-12);
    CHECK(std::abs(lat.e[1] - CD(-0.5, std::sqrt(3) / 2)) < 1e-12);
    CHECK(std::abs(lat.e[2] - CD(1, 0)) < 1e-12);
}

TEST_CASE("zero discriminant refuses") {
    CHECK_THROWS_AS((void)dtv::lattice_from_invariants<CD>(CD(3), CD(1)),
                    std::domain_error);
    CHECK_THROWS_AS((void)dtv::lattice_from_invariants<ExactScalar>(q(3), q(1)),
                    std::domain_error);
}

TEST_CASE("exact mode refuses irrational half-period values") {
    // 4t^3 - 4 has the irrational pair of roots.
    CHECK_THROWS_AS((void)dtv::lattice_from_invariants<ExactScalar>(q(0), q(4)),
                    std::domain_error);
    // 4t^3 + 4t factors over Q(i): roots 0, ±i.
    auto lat = dtv::lattice_from_invariants<ExactScalar>(q(-4), q(0));
    CHECK(lat.e[0] == ExactScalar(0, -1));
    CHECK(lat.e[1] == q(0));
    CHECK(lat.e[2] == ExactScalar(0, 1));
}

TEST_CASE("wp series at the origin starts 1/t^2 + g2/20 t^2 + g3/28 t^4") {
    auto lat = dtv::lattice_from_invariants<ExactScalar>(q(28), q(-24));
    auto s = wp_series(lat, 0, 4);
    CHECK(s.coeff(-2) == q(1));
    CHECK(s.coeff(-1) == q(0));
    CHECK(s.coeff(0) == q(0));
    CHECK(s.coeff(2) == q(28, 20));
    CHECK(s.coeff(4) == q(-24, 28));
    for (int d = -1; d <= 3; d += 2) CHECK(s.coeff(d) == q(0));
}

TEST_CASE("wp series satisfies its differential equation exactly") {
    for (auto [a, b] : {std::pair<long, long>{4, 0}, {-4, 0}, {28, -24}}) {
        auto lat = dtv::lattice_from_invariants<ExactScalar>(q(a), q(b));
        for (int center = 0; center <= 3; ++center) {
            auto p = wp_series(lat, center, 24);
            auto pp = derivative(p);
            auto resid = pp * pp - q(4) * (p * p * p) + lat.g2 * p + lat.g3 * LaurentSeries<ExactScalar>::constant(ExactScalar(), q(1), 24);
            CHECK(resid.is_zero());
        }
    }
}

TEST_CASE("wp series at a half-period has the root as constant and is even") {
    auto lat = dtv::lattice_from_invariants<ExactScalar>(q(4), q(0));
    for (int center = 1; center <= 3; ++center) {
        auto s = wp_series(lat, center, 16);
        CHECK(s.coeff(0) == lat.e[center - 1]);
        for (int d = 1; d <= 15; d += 2) CHECK(s.coeff(d) == q(0));
    }
}

TEST_CASE("pointwise evaluation satisfies the differential equation") {
    std::mt19937_64 rng(42);
    for (auto [a, b] : {std::pair<double, double>{4, 0}, {0, 4}, {8, 4}}) {
        auto lat = dtv::lattice_from_invariants<CD>(CD(a), CD(b));
        for (int i = 0; i < 100; ++i) {
            CHECK(wp_ode_residual(lat, random_cell_point(rng, lat)) <= 1e-10);
        }
    }
}

TEST_CASE("wp is periodic and even") {
    std::mt19937_64 rng(7);
    auto lat = dtv::lattice_from_invariants<CD>(CD(8), CD(4));
    CD w1 = (*lat.omega)[0], w2 = (*lat.omega)[1];
    for (int i = 0; i < 20; ++i) {
        CD z = random_cell_point(rng, lat);
        CD v = wp_eval(lat, z);
        double scale = std::max(1.0, std::abs(v));
        CHECK(std::abs(wp_eval(lat, z + 2.0 * w1) - v) <= 1e-9 * scale);
        CHECK(std::abs(wp_eval(lat, z + 2.0 * w2) - v) <= 1e-9 * scale);
        CHECK(std::abs(wp_eval(lat, -z) - v) <= 1e-10 * scale);
    }
}

TEST_CASE("wp at half-periods reproduces the roots") {
    for (auto [a, b] : {std::pair<double, double>{4, 0}, {0, 4}, {8, 4}}) {
        auto lat = dtv::lattice_from_invariants<CD>(CD(a), CD(b));
        CD w1 = (*lat.omega)[0], w2 = (*lat.omega)[1];
        std::array<CD, 3> ws = {w1, w2, w1 + w2};
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(wp_eval(lat, ws[i]) - lat.e[i]) <= 1e-9);
        }
    }
}

TEST_CASE("wp_eval refuses lattice points") {
    auto lat = dtv::lattice_from_invariants<CD>(CD(4), CD(0));
    CHECK_THROWS_AS((void)wp_eval(lat, CD(0)), dtv::pole_error);
    CD period = 2.0 * (*lat.omega)[0];
    CHECK_THROWS_AS((void)wp_eval(lat, period), dtv::pole_error);
}

TEST_CASE("wp_eval agrees with the direct lattice sum") {
    std::mt19937_64 rng(11);
    auto lat = dtv::lattice_from_invariants<CD>(CD(4), CD(0));
    for (int i = 0; i < 20; ++i) {
        CD z = random_cell_point(rng, lat);
        CD direct = wp_lattice_sum(lat, z, 40);
        CD fast = wp_eval(lat, z);
        CHECK(std::abs(direct - fast) <= 1e-8 * std::max(1.0, std::abs(fast)));
    }
}

TEST_CASE("square lattice has g3 = 0") {
    auto lat = dtv::lattice_from_periods<double>(CD(1), CD(0, 1));
    CHECK(std::abs(lat.g3) <= 1e-12 * std::abs(lat.g2));
    CHECK(std::abs(lat.g2.imag()) <= 1e-12 * std::abs(lat.g2));
}

TEST_CASE("hexagonal lattice has g2 = 0 within the reported truncation error") {
    // The index-box truncation is not hexagonally symmetric, so the
    // cancellation is only as good as the tail bound.
    CD tau = std::polar(1.0, M_PI / 3.0);
    auto lat = dtv::lattice_from_periods<double>(CD(1), tau);
    CHECK(std::abs(lat.g2) <= lat.tolerance);
    auto finer = dtv::lattice_from_periods<double>(CD(1), tau, 120);
    CHECK(std::abs(finer.g2) < std::abs(lat.g2));
}

TEST_CASE("period-built invariants match a doubled-truncation Eisenstein sum") {
    auto lat40 = dtv::lattice_from_periods<double>(CD(1), CD(0, 1), 40);
    auto lat80 = dtv::lattice_from_periods<double>(CD(1), CD(0, 1), 80);
    CHECK(std::abs(lat40.g2 - lat80.g2) <= lat40.tolerance);
    // Consistency: wp(omega_i) = e_i within the reported tolerance.
    CD w1 = (*lat40.omega)[0], w2 = (*lat40.omega)[1];
    std::array<CD, 3> ws = {w1, w2, w1 + w2};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(wp_eval(lat40, ws[i]) - lat40.e[i]) <= 10 * lat40.tolerance);
    }
}

TEST_CASE("invariant- and period-built lattices round-trip") {
    auto lat = dtv::lattice_from_invariants<CD>(CD(8), CD(4));
    auto back = dtv::lattice_from_periods<double>((*lat.omega)[0], (*lat.omega)[1]);
    CHECK(std::abs(back.g2 - lat.g2) <= back.tolerance);
    CHECK(std::abs(back.g3 - lat.g3) <= back.tolerance);
}

TEST_CASE("jacobi functions: special values and limits") {
    auto at0 = dtv::jacobi_eval(0.7, CD(0));
    CHECK(std::abs(at0.sn) == 0);
    CHECK(std::abs(at0.cn - 1.0) == 0);
    CHECK(std::abs(at0.dn - 1.0) == 0);

    auto circ = dtv::jacobi_eval(0.0, CD(0.9, 0.3));
    CHECK(std::abs(circ.sn - std::sin(CD(0.9, 0.3))) <= 1e-13);
    CHECK(std::abs(circ.cn - std::cos(CD(0.9, 0.3))) <= 1e-13);
    CHECK(std::abs(circ.dn - 1.0) == 0);

    auto hyp = dtv::jacobi_eval(1.0, CD(0.8));
    CHECK(std::abs(hyp.sn - std::tanh(0.8)) <= 1e-13);
    CHECK(std::abs(hyp.cn - 1.0 / std::cosh(0.8)) <= 1e-13);
    CHECK(std::abs(hyp.dn - hyp.cn) == 0);
}

TEST_CASE("jacobi identities hold on sampled arguments") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uk(0.05, 0.95);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double k = uk(rng);
        CD z(ux(rng), uy(rng));
        auto j = dtv::jacobi_eval(k, z);
        CHECK(std::abs(j.sn * j.sn + j.cn * j.cn - 1.0) <= 1e-12);
        CHECK(std::abs(j.dn * j.dn + k * k * j.sn * j.sn - 1.0) <= 1e-12);
    }
}

TEST_CASE("jacobi small-k behavior approaches the circular limit") {
    auto j = dtv::jacobi_eval(1e-3, CD(1.1));
    CHECK(std::abs(j.sn - std::sin(1.1)) <= 1e-5);
}
