#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dtv/monodromy.hpp"

using dtv::ExactScalar;
using dtv::LaurentSeries;
using dtv::Verdict;
using CD = std::complex<double>;

namespace {

ExactScalar q(long n, long d = 1) { return ExactScalar(mpq_class(n, d)); }

LaurentSeries<ExactScalar> local(int min_degree, std::vector<ExactScalar> cs) {
    return LaurentSeries<ExactScalar>(ExactScalar(), min_degree, std::move(cs));
}

/// u = m(m+1)/z^2 + sum of the given coefficients from degree 0 upward.
LaurentSeries<ExactScalar> pole_with_tail(long m, std::vector<ExactScalar> tail, int order) {
    std::vector<ExactScalar> cs(static_cast<std::size_t>(order) + 3, q(0));
    cs[0] = q(m * (m + 1));
    for (std::size_t j = 0; j < tail.size(); ++j) cs[j + 2] = tail[j];
    return local(-2, std::move(cs));
}

} // namespace

TEST_CASE("dg_check accepts the Lame potential 6 wp") {
    auto lat = dtv::lattice_from_invariants<ExactScalar>(q(4), q(0));
    auto spec = dtv::dtv_build<ExactScalar>({2, 0, 0, 0}, lat);
    auto u = dtv::potential_series_at_pole(spec, 0, 8);
    auto v = dtv::dg_check(u);
    CHECK(v.verdict == Verdict::trivial);
    CHECK(*v.m == 2);
    CHECK(v.odd_residuals.size() == 2);
    for (const auto& [k, r] : v.odd_residuals) CHECK(r == q(0));
}

TEST_CASE("dg_check rejects an odd coefficient") {
    // 2/z^2 + z: m = 1 requires c_1 = 0
    auto u = pole_with_tail(1, {q(0), q(1)}, 4);
    auto v = dtv::dg_check(u);
    CHECK(v.verdict == Verdict::fails_odd_coefficient);
    CHECK(*v.m == 1);
    REQUIRE(v.odd_residuals.size() == 1);
    CHECK(v.odd_residuals[0].second == q(1));
}

TEST_CASE("dg_check rejects a non-triangular leading coefficient") {
    auto u = pole_with_tail(0, {}, 4);
    // overwrite c_{-2} = 1: m^2 + m - 1 has no integer root
    auto u1 = local(-2, {q(1), q(0), q(0), q(0), q(0), q(0), q(0)});
    auto v = dtv::dg_check(u1);
    CHECK(v.verdict == Verdict::fails_triangular);
    CHECK(v.odd_residuals.empty());
    CHECK_FALSE(v.m.has_value());
    (void)u;
}

TEST_CASE("dg_check errors") {
    // third-order pole
    auto bad1 = local(-3, {q(1), q(0), q(0), q(0)});
    CHECK_THROWS_AS((void)dtv::dg_check(bad1), std::domain_error);
    // nonzero residue
    auto bad2 = local(-2, {q(2), q(1), q(0), q(0)});
    CHECK_THROWS_AS((void)dtv::dg_check(bad2), std::domain_error);
    // truncation too short for m = 3: needs c_5
    auto short3 = local(-2, {q(12), q(0), q(0)});
    CHECK_THROWS_AS((void)dtv::dg_check(short3), dtv::truncation_error);
    try {
        (void)dtv::dg_check(short3);
    } catch (const dtv::truncation_error& e) {
        CHECK(e.required_trunc_order == 5);
    }
}

TEST_CASE("regular points pass trivially with m = 0") {
    auto u = local(0, {q(3), q(1), q(4)});
    auto v = dtv::dg_check(u);
    CHECK(v.verdict == Verdict::trivial);
    CHECK(*v.m == 0);
    CHECK(v.odd_residuals.empty());
}

TEST_CASE("frobenius basis at a regular point reproduces cos and sin") {
    auto u = LaurentSeries<ExactScalar>::zero(ExactScalar(), 12);
    auto basis = dtv::frobenius_solve(u, q(1), 10);
    CHECK(basis.exponents[0] == q(0));
    CHECK(basis.exponents[1] == q(-1));
    CHECK_FALSE(basis.log_required);
    // psi1 is the factor of z^0: cos(z) for lambda = 1
    CHECK(basis.psi1.coeff(0) == q(1));
    CHECK(basis.psi1.coeff(2) == q(-1, 2));
    CHECK(basis.psi1.coeff(4) == q(1, 24));
    CHECK(basis.psi1.coeff(1) == q(0));
    // psi2 pairs with mu = -1: z * psi2 = sin-type series: psi2 = 1 - z^2/6 + ...
    CHECK(basis.psi2.coeff(2) == q(-1, 6));
    CHECK(basis.psi2.coeff(4) == q(1, 120));
}

TEST_CASE("frobenius exponents for 2/z^2") {
    auto u = pole_with_tail(1, {}, 8);
    auto basis = dtv::frobenius_solve(u, q(3), 8);
    CHECK(basis.exponents[0] == q(1));
    CHECK(basis.exponents[1] == q(-2));
    CHECK_FALSE(basis.log_required);
    CHECK(basis.obstruction == q(0));
}

TEST_CASE("frobenius detects the logarithmic obstruction of 2/z^2 + z") {
    auto u = pole_with_tail(1, {q(0), q(1)}, 8);
    for (const auto& lam : dtv::sample_lambdas<ExactScalar>(2024, 8)) {
        auto basis = dtv::frobenius_solve(u, lam, 8);
        CHECK(basis.log_required);
        CHECK(basis.obstruction == q(1));
    }
}

TEST_CASE("frobenius refuses an expansion shorter than the requested order") {
    auto u = pole_with_tail(1, {}, 3);
    CHECK_THROWS_AS((void)dtv::frobenius_solve(u, q(1), 12), dtv::truncation_error);
}

TEST_CASE("DG and Frobenius agree on random local potentials") {
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<long> mm(1, 4);
    std::uniform_int_distribution<long> coef(-5, 5);
    auto lambdas = dtv::sample_lambdas<ExactScalar>(77, 8);
    int passing = 0, failing = 0;
    while (passing < 10 || failing < 10) {
        long m = mm(rng);
        bool want_fail = failing < 10 && (passing >= 10 || (rng() & 1));
        std::vector<ExactScalar> tail(static_cast<std::size_t>(2 * m + 4), q(0));
        for (std::size_t j = 0; j < tail.size(); j += 2) tail[j] = q(coef(rng));
        if (want_fail) {
            std::size_t slot = 1 + 2 * (rng() % static_cast<std::size_t>(m));
            long v = coef(rng);
            tail[slot] = q(v == 0 ? 3 : v); // some odd coefficient <= 2m-1
        }
        auto u = pole_with_tail(m, tail, static_cast<int>(2 * m + 6));
        auto verdict = dtv::dg_check(u);
        if (want_fail) {
            REQUIRE(verdict.verdict == Verdict::fails_odd_coefficient);
        } else {
            REQUIRE(verdict.verdict == Verdict::trivial);
        }
        for (const auto& lam : lambdas) {
            auto basis = dtv::frobenius_solve(u, lam, static_cast<int>(2 * m + 6));
            CHECK(basis.log_required == (verdict.verdict != Verdict::trivial));
        }
        (want_fail ? failing : passing) += 1;
    }
}

TEST_CASE("dg verdict is invariant under constant shifts and reflection") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<long> coef(-5, 5);
    for (int trial = 0; trial < 25; ++trial) {
        long m = 1 + static_cast<long>(rng() % 3);
        std::vector<ExactScalar> tail(static_cast<std::size_t>(2 * m + 4), q(0));
        for (std::size_t j = 0; j < tail.size(); ++j) {
            if (rng() % 3 == 0) tail[j] = q(coef(rng));
        }
        auto u = pole_with_tail(m, tail, static_cast<int>(2 * m + 6));
        auto base = dtv::dg_check(u).verdict;

        // add a constant
        auto shifted = u + LaurentSeries<ExactScalar>::constant(ExactScalar(), q(17, 3),
                                                                u.trunc_order());
        CHECK(dtv::dg_check(shifted).verdict == base);

        // z -> -z negates odd coefficients
        std::vector<ExactScalar> neg;
        for (int d = u.min_degree(); d <= u.trunc_order(); ++d) {
            neg.push_back(d % 2 ? -u.coeff(d) : u.coeff(d));
        }
        auto reflected = LaurentSeries<ExactScalar>(ExactScalar(), u.min_degree(), neg);
        CHECK(dtv::dg_check(reflected).verdict == base);
    }
}

TEST_CASE("monodromy report: integer DTV potentials pass on all exact test lattices") {
    for (auto [g2n, g3n] : {std::pair<long, long>{4, 0}, {-4, 0}, {28, -24}}) {
        auto lat = dtv::lattice_from_invariants<ExactScalar>(q(g2n), q(g3n));
        auto spec = dtv::dtv_build<ExactScalar>({1, 1, 1, 1}, lat);
        auto report = dtv::trivial_monodromy_report(spec);
        CHECK(report.overall);
        CHECK(report.verdicts.size() == 4);
        for (const auto& v : report.verdicts) {
            CHECK(v.verdict == Verdict::trivial);
            CHECK(*v.m == 1);
        }
    }
}

TEST_CASE("perturbing one alpha by 1/2 breaks the verdict at that pole") {
    auto lat = dtv::lattice_from_invariants<ExactScalar>(q(4), q(0));
    auto spec = dtv::dtv_build<ExactScalar>({1, 2, 1, 1}, lat);
    auto& d = std::get<dtv::DtvPotential<ExactScalar>>(spec);
    d.alpha[2] = d.alpha[2] + q(1, 2);
    d.m.reset();
    auto report = dtv::trivial_monodromy_report(spec);
    CHECK_FALSE(report.overall);
    CHECK(report.verdicts[2].verdict == Verdict::fails_triangular);
    CHECK(report.verdicts[0].verdict == Verdict::trivial);
    CHECK(report.verdicts[1].verdict == Verdict::trivial);
    CHECK(report.verdicts[3].verdict == Verdict::trivial);
}

TEST_CASE("monodromy report for the Poschl-Teller potential") {
    auto spec = dtv::trig_build<ExactScalar>(1, 2, q(1));
    auto report = dtv::trivial_monodromy_report(spec);
    CHECK(report.overall);
    REQUIRE(report.verdicts.size() == 2);
    CHECK(*report.verdicts[0].m == 1);
    CHECK(*report.verdicts[1].m == 2);
}

TEST_CASE("monodromy report in floating mode matches exact mode") {
    auto lat = dtv::lattice_from_invariants<CD>(CD(4), CD(0));
    auto spec = dtv::dtv_build<CD>({2, 1, 0, 1}, lat);
    auto report = dtv::trivial_monodromy_report(spec);
    CHECK(report.overall);
    CHECK(*report.verdicts[0].m == 2);
    CHECK(*report.verdicts[3].m == 1);
}

TEST_CASE("the section-3 counterexample family passes the local test") {
    // u = m(m+1)/z^2 + P(z) for even P: trivial monodromy at the pole.
    auto u = pole_with_tail(1, {q(0), q(0), q(1)}, 8); // 2/z^2 + z^2
    auto v = dtv::dg_check(u);
    CHECK(v.verdict == Verdict::trivial);
}
