#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dtv/potentials.hpp"
#include "dtv/series.hpp"

namespace dtv {

enum class Verdict { trivial, fails_triangular, fails_odd_coefficient };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::trivial: return "trivial";
        case Verdict::fails_triangular: return "fails_triangular";
        default: return "fails_odd_coefficient";
    }
}

/// Outcome of the Laurent-coefficient monodromy test at one pole:
/// c_{-2} = m(m+1) with m a nonnegative integer, and c_{2k-1} = 0 for
/// k = 1..m.
template <class S>
struct PoleVerdict {
    std::string pole_class;
    std::optional<S> pole_point;
    S c_minus2{};
    std::optional<long> m;
    std::vector<std::pair<long, S>> odd_residuals; // (k, c_{2k-1})
    Verdict verdict = Verdict::trivial;
};

template <class S>
struct MonodromyReport {
    PotentialSpec<S> spec;
    std::vector<PoleVerdict<S>> verdicts;
    bool overall = false;
    std::uint64_t lambda_seed = 0;
};

/// Frobenius data of -phi'' + (u - lambda) phi = 0 at a second-order pole.
/// The exponents mu solve mu(mu+1) = c_{-2}; each solution is
/// t^{-mu_i} psi_i with psi_i the stored unit-leading factor series.
/// log_required records a nonvanishing resonance obstruction.
template <class S>
struct FrobeniusBasis {
    std::array<S, 2> exponents{}; // mu_1 (larger real part) and mu_2 = -1 - mu_1
    LaurentSeries<S> psi1, psi2;
    bool log_required = false;
    S obstruction{};
};

namespace detail {

/// Integer m >= 0 with c = m(m+1), when it exists.
template <class S>
std::optional<long> triangular_label(const S& c, double eps, double scale) {
    using traits = scalar_traits<S>;
    if constexpr (traits::is_exact) {
        if (c.im() != 0) return std::nullopt;
        const mpq_class& q = c.re();
        if (q < 0 || q.get_den() != 1) return std::nullopt;
        mpz_class disc = 4 * q.get_num() + 1;
        if (mpz_perfect_square_p(disc.get_mpz_t()) == 0) return std::nullopt;
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), disc.get_mpz_t());
        mpz_class m2 = (s - 1) / 2;
        if (!m2.fits_slong_p()) return std::nullopt;
        return m2.get_si();
    } else {
        auto cd = traits::to_complex(c);
        double tol = std::max(eps * scale, 1e-8 * std::max(1.0, std::abs(cd)));
        if (std::abs(cd.imag()) > tol) return std::nullopt;
        double disc = 1.0 + 4.0 * cd.real();
        if (disc < 0) return std::nullopt;
        double mf = (-1.0 + std::sqrt(disc)) / 2.0;
        double mr = std::round(mf);
        if (mr < 0 || std::abs(mf - mr) > 1e-8) return std::nullopt;
        long m = static_cast<long>(mr);
        if (std::abs(cd.real() - double(m) * double(m + 1)) > tol) return std::nullopt;
        return m;
    }
}

template <class S>
bool coeff_is_zero(const S& c, double eps, double scale) {
    using traits = scalar_traits<S>;
    if constexpr (traits::is_exact) {
        return traits::is_zero(c);
    } else {
        return traits::magnitude(c) <= eps * scale;
    }
}

template <class S>
void require_second_order_pole_form(const LaurentSeries<S>& u, double eps) {
    if (u.min_degree() < -2) {
        throw std::domain_error(
            "malformed pole: expansion has a pole of order greater than two");
    }
    if (!detail::coeff_is_zero(u.min_degree() <= -1 && u.trunc_order() >= -1
                                   ? u.coeff(-1)
                                   : scalar_traits<S>::zero(),
                               eps, u.max_coeff_magnitude())) {
        throw std::domain_error("malformed pole: nonzero residue at a second-order pole");
    }
}

} // namespace detail

/// The Laurent-coefficient test for trivial monodromy at one pole.
template <class S>
PoleVerdict<S> dg_check(const LaurentSeries<S>& u_local, double eps = kDefaultEpsilon) {
    using traits = scalar_traits<S>;
    detail::require_second_order_pole_form(u_local, eps);
    PoleVerdict<S> v;
    v.c_minus2 = u_local.min_degree() <= -2 ? u_local.coeff(-2) : traits::zero();
    const double scale = u_local.max_coeff_magnitude();
    v.m = detail::triangular_label(v.c_minus2, eps, scale);
    if (!v.m) {
        v.verdict = Verdict::fails_triangular;
        return v;
    }
    const long m = *v.m;
    if (u_local.trunc_order() < 2 * m - 1) {
        throw truncation_error("dg_check: expansion too short for the odd-coefficient "
                               "conditions through 2m-1",
                               static_cast<int>(2 * m - 1));
    }
    v.verdict = Verdict::trivial;
    for (long k = 1; k <= m; ++k) {
        const S& c = u_local.coeff(static_cast<int>(2 * k - 1));
        v.odd_residuals.emplace_back(k, c);
        if (!detail::coeff_is_zero(c, eps, scale)) {
            v.verdict = Verdict::fails_odd_coefficient;
        }
    }
    return v;
}

/// Builds the Frobenius solution pair of -phi'' + (u - lambda) phi = 0.
/// When the exponent gap is a positive integer, the smaller-exponent
/// recursion hits a resonance; the obstruction value there decides
/// whether a logarithm is forced.
template <class S>
FrobeniusBasis<S> frobenius_solve(const LaurentSeries<S>& u_local, const S& lambda,
                                  int order, double eps = kDefaultEpsilon) {
    using traits = scalar_traits<S>;
    detail::require_second_order_pole_form(u_local, eps);
    if (order < 2) throw truncation_error("frobenius_solve: order must be at least 2", 2);
    if (u_local.trunc_order() < order - 2) {
        throw truncation_error("frobenius_solve: potential expansion too short",
                               order - 2);
    }
    const S c = u_local.min_degree() <= -2 ? u_local.coeff(-2) : traits::zero();

    S mu1, mu2;
    std::optional<long> gap; // mu1 - mu2 when it is a positive integer
    if constexpr (traits::is_exact) {
        // disc = 1 + 4c must be the square of a rational for an exact basis.
        if (c.im() != 0) {
            throw std::domain_error("exact Frobenius needs a real rational c_{-2}");
        }
        mpq_class disc = 4 * c.re() + 1;
        if (disc < 0 || mpz_perfect_square_p(disc.get_num_mpz_t()) == 0 ||
            mpz_perfect_square_p(disc.get_den_mpz_t()) == 0) {
            throw std::domain_error(
                "exact Frobenius needs rational exponents; use floating mode");
        }
        mpz_class sn, sd;
        mpz_sqrt(sn.get_mpz_t(), disc.get_num_mpz_t());
        mpz_sqrt(sd.get_mpz_t(), disc.get_den_mpz_t());
        mpq_class root(sn, sd);
        root.canonicalize();
        mu1 = S(mpq_class((root - 1) / 2));
        mu2 = S(mpq_class((-root - 1) / 2));
        if (root.get_den() == 1 && root > 0) gap = root.get_num().get_si();
    } else {
        S disc = traits::from_int(4) * c + traits::one();
        S root = std::sqrt(disc);
        if (root.real() < 0) root = -root;
        mu1 = (root - traits::one()) / traits::from_int(2);
        mu2 = (-root - traits::one()) / traits::from_int(2);
        double g = root.real();
        if (std::abs(root.imag()) <= 1e-10 * std::max(1.0, g) && g >= 0.5 &&
            std::abs(g - std::round(g)) <= 1e-8) {
            gap = static_cast<long>(std::round(g));
        }
    }

    FrobeniusBasis<S> basis{{mu1, mu2},
                            LaurentSeries<S>::zero(u_local.base_point(), order),
                            LaurentSeries<S>::zero(u_local.base_point(), order),
                            false,
                            traits::zero()};

    // xi recursion: xi_i * [(rho+i)(rho+i-1) - c] + sum_j (c_j - lambda d_j0) xi_{i-2-j} = 0
    auto build = [&](const S& mu, bool resonant_branch) {
        const S rho = -mu;
        std::vector<S> xi(static_cast<std::size_t>(order) + 1, traits::zero());
        xi[0] = traits::one();
        for (int i = 1; i <= order; ++i) {
            S acc = traits::zero();
            double scale = 0;
            for (int j = 0; j <= i - 2; ++j) {
                S cj = (j <= u_local.trunc_order() && j >= u_local.min_degree())
                           ? u_local.coeff(j)
                           : traits::zero();
                if (j == 0) cj = cj - lambda;
                S term = cj * xi[static_cast<std::size_t>(i - 2 - j)];
                scale = std::max(scale, traits::magnitude(term));
                acc += term;
            }
            const S denom = (rho + traits::from_int(i)) * (rho + traits::from_int(i - 1)) - c;
            const bool at_resonance = resonant_branch && gap && i == *gap;
            if (at_resonance) {
                basis.obstruction = acc;
                basis.log_required = !detail::coeff_is_zero(acc, eps, std::max(scale, 1.0));
                xi[static_cast<std::size_t>(i)] = traits::zero();
            } else {
                xi[static_cast<std::size_t>(i)] = acc / denom;
            }
        }
        return LaurentSeries<S>(u_local.base_point(), 0, std::move(xi));
    };

    basis.psi1 = build(mu1, true); // the smaller exponent rho = -mu1 hits the resonance
    basis.psi2 = build(mu2, false);
    return basis;
}

/// Deterministic spectral-parameter samples, identical across backends.
template <class S>
std::vector<S> sample_lambdas(std::uint64_t seed, int count) {
    using traits = scalar_traits<S>;
    std::mt19937_64 rng(seed);
    std::vector<S> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        long num = static_cast<long>(rng() % 2001) - 1000;
        if (num == 0) num = 7;
        long den = static_cast<long>(rng() % 40) + 1;
        out.push_back(traits::from_ratio(num, den));
    }
    return out;
}

/// Runs dg_check at every pole-class representative and aggregates.
template <class S>
MonodromyReport<S> trivial_monodromy_report(const PotentialSpec<S>& spec, int order = 0,
                                            double eps = kDefaultEpsilon,
                                            std::uint64_t lambda_seed = 0) {
    using traits = scalar_traits<S>;
    MonodromyReport<S> report{spec, {}, true, lambda_seed};
    const auto classes = pole_classes(spec);
    for (int i = 0; i < static_cast<int>(classes.size()); ++i) {
        const auto& info = classes[static_cast<std::size_t>(i)];
        int use_order = order;
        if (use_order <= 0) {
            auto m_guess = detail::triangular_label(info.attached, eps,
                                                    traits::magnitude(info.attached));
            use_order = m_guess ? std::max<int>(8, static_cast<int>(2 * *m_guess + 2)) : 8;
        }
        auto local = potential_series_at_pole(spec, i, use_order);
        auto verdict = dg_check(local, eps);
        verdict.pole_class = info.label;
        verdict.pole_point = info.point;
        if (verdict.verdict != Verdict::trivial) report.overall = false;
        report.verdicts.push_back(std::move(verdict));
    }
    return report;
}

} // namespace dtv
