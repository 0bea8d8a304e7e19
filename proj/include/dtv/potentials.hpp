#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dtv/elliptic.hpp"
#include "dtv/errors.hpp"
#include "dtv/series.hpp"

namespace dtv {

/// u(z) = alpha4 wp(z') + sum_i alpha_i wp(z' - omega_i) + alpha0, with
/// z' = z - shift.  Integer labels are kept when the alphas are the
/// triangular numbers m(m+1): m[0] pairs with alpha[4], m[i] with alpha[i].
template <class S>
struct DtvPotential {
    Lattice<S> lattice;
    std::array<S, 5> alpha{}; // [0] constant, [1..3] half-period terms, [4] wp(z)
    std::optional<std::array<long, 4>> m;
    S shift{};
};

/// u(z) = alpha1 a^2/sin^2(a z') + alpha2 a^2/cos^2(a z') + alpha0.
template <class S>
struct TrigPotential {
    S a{};
    S alpha0{}, alpha1{}, alpha2{};
    std::optional<std::array<long, 2>> m;
    S shift{};
};

/// u(z) = alpha1 / z'^2 + alpha0.
template <class S>
struct RatPotential {
    S alpha0{}, alpha1{};
    std::optional<long> m;
    S shift{};
};

/// u(z) = sum_i m_i(m_i+1) a^2/sin^2(a(z - z_i)) + const.
template <class S>
struct TrigMultiPotential {
    S a{};
    std::vector<S> sites;
    std::vector<long> m;
    S constant{};
};

template <class S>
using PotentialSpec =
    std::variant<DtvPotential<S>, TrigPotential<S>, RatPotential<S>, TrigMultiPotential<S>>;

namespace detail {

template <class S>
S triangular(long m) {
    using traits = scalar_traits<S>;
    return traits::from_int(m) * traits::from_int(m + 1);
}

} // namespace detail

template <class S>
PotentialSpec<S> dtv_build(const std::array<long, 4>& m, Lattice<S> lat, S alpha0 = {}) {
    for (long mi : m) {
        if (mi < 0) {
            throw std::invalid_argument(
                "dtv_build: labels must be nonnegative (use m -> -m-1 to normalize)");
        }
    }
    DtvPotential<S> p;
    p.lattice = std::move(lat);
    p.alpha[0] = alpha0;
    p.alpha[4] = detail::triangular<S>(m[0]);
    for (int i = 1; i <= 3; ++i) p.alpha[static_cast<std::size_t>(i)] = detail::triangular<S>(m[static_cast<std::size_t>(i)]);
    p.m = m;
    return p;
}

template <class S>
PotentialSpec<S> trig_build(long m1, long m2, S a, S alpha0 = {}) {
    if (m1 < 0 || m2 < 0) {
        throw std::invalid_argument("trig_build: labels must be nonnegative");
    }
    TrigPotential<S> p;
    p.a = std::move(a);
    p.alpha0 = std::move(alpha0);
    p.alpha1 = detail::triangular<S>(m1);
    p.alpha2 = detail::triangular<S>(m2);
    p.m = std::array<long, 2>{m1, m2};
    return p;
}

template <class S>
PotentialSpec<S> rat_build(long m, S alpha0 = {}) {
    if (m < 0) throw std::invalid_argument("rat_build: label must be nonnegative");
    RatPotential<S> p;
    p.alpha0 = std::move(alpha0);
    p.alpha1 = detail::triangular<S>(m);
    p.m = m;
    return p;
}

// ---------------------------------------------------------------------------
// Local trigonometric series

template <class S>
LaurentSeries<S> sin_series(const S& a, int order) {
    using traits = scalar_traits<S>;
    std::vector<S> c(static_cast<std::size_t>(std::max(order, 1)) + 1, traits::zero());
    S term = a; // a^(2j+1) / (2j+1)! with alternating sign
    for (int d = 1; d <= order; d += 2) {
        c[static_cast<std::size_t>(d)] = term;
        term = -term * a * a / traits::from_int((d + 1) * (d + 2));
    }
    return LaurentSeries<S>(traits::zero(), 0, std::move(c));
}

template <class S>
LaurentSeries<S> cos_series(const S& a, int order) {
    using traits = scalar_traits<S>;
    std::vector<S> c(static_cast<std::size_t>(std::max(order, 0)) + 1, traits::zero());
    S term = traits::one();
    for (int d = 0; d <= order; d += 2) {
        c[static_cast<std::size_t>(d)] = term;
        term = -term * a * a / traits::from_int((d + 1) * (d + 2));
    }
    return LaurentSeries<S>(traits::zero(), 0, std::move(c));
}

/// a^2 / sin^2(a t), a Laurent series with principal part 1/t^2.
template <class S>
LaurentSeries<S> inv_sin_sq_series(const S& a, int order) {
    using traits = scalar_traits<S>;
    auto s = sin_series(a, order + 3);
    auto one = LaurentSeries<S>::constant(traits::zero(), a * a, order + 2);
    return one / (s * s);
}

/// a^2 / cos^2(a t), a regular Taylor series.
template <class S>
LaurentSeries<S> inv_cos_sq_series(const S& a, int order) {
    using traits = scalar_traits<S>;
    auto c = cos_series(a, order + 2);
    auto num = LaurentSeries<S>::constant(traits::zero(), a * a, order);
    return num / (c * c);
}

// ---------------------------------------------------------------------------
// Pole-class bookkeeping

template <class S>
struct PoleClassInfo {
    std::string label;
    std::optional<S> point; // absent when not representable in this backend
    S attached;             // leading Laurent coefficient of the class
};

template <class S>
std::vector<PoleClassInfo<S>> pole_classes(const PotentialSpec<S>& spec) {
    using traits = scalar_traits<S>;
    std::vector<PoleClassInfo<S>> out;
    if (const auto* d = std::get_if<DtvPotential<S>>(&spec)) {
        out.push_back({"0", d->shift, d->alpha[4]});
        for (int i = 1; i <= 3; ++i) {
            PoleClassInfo<S> info;
            info.label = "omega" + std::to_string(i);
            if (d->lattice.omega) {
                S w = i < 3 ? (*d->lattice.omega)[static_cast<std::size_t>(i - 1)]
                            : d->lattice.third_half_period();
                info.point = d->shift + w;
            }
            info.attached = d->alpha[static_cast<std::size_t>(i)];
            out.push_back(std::move(info));
        }
    } else if (const auto* t = std::get_if<TrigPotential<S>>(&spec)) {
        out.push_back({"0", t->shift, t->alpha1});
        PoleClassInfo<S> info;
        info.label = "pi/(2a)";
        if constexpr (!traits::is_exact) {
            using T = typename traits::real_type;
            info.point = t->shift + S(T(M_PI) / T(2)) / t->a;
        }
        info.attached = t->alpha2;
        out.push_back(std::move(info));
    } else if (const auto* r = std::get_if<RatPotential<S>>(&spec)) {
        out.push_back({"0", r->shift, r->alpha1});
    } else {
        const auto& tm = std::get<TrigMultiPotential<S>>(spec);
        for (std::size_t i = 0; i < tm.sites.size(); ++i) {
            out.push_back({"site" + std::to_string(i), tm.sites[i],
                           detail::triangular<S>(tm.m[i])});
        }
    }
    return out;
}

/// Expansion of the potential in the local coordinate t = z - pole, for a
/// pole-class representative.  Classes with a zero attached coefficient
/// yield a regular Taylor series.
template <class S>
LaurentSeries<S> potential_series_at_pole(const PotentialSpec<S>& spec, int pole_index,
                                          int order) {
    using traits = scalar_traits<S>;
    if (order < 2) {
        throw truncation_error("potential_series_at_pole: order must be at least 2", 2);
    }
    const auto classes = pole_classes(spec);
    if (pole_index < 0 || pole_index >= static_cast<int>(classes.size())) {
        throw std::invalid_argument("pole index out of range for this potential");
    }
    // Series are computed in the local coordinate t = z - pole and then
    // relabelled to the pole when it is representable in this backend.
    const S base = classes[static_cast<std::size_t>(pole_index)].point
                       ? *classes[static_cast<std::size_t>(pole_index)].point
                       : traits::zero();
    const S zero = traits::zero();
    if (const auto* d = std::get_if<DtvPotential<S>>(&spec)) {
        auto acc = LaurentSeries<S>::constant(zero, d->alpha[0], order);
        for (int i = 0; i <= 3; ++i) {
            const S& coeff = d->alpha[static_cast<std::size_t>(i == 0 ? 4 : i)];
            if (traits::is_zero(coeff)) continue;
            // Recentring wp(z - omega_i) at omega_j lands on the class i^j.
            int k = i ^ pole_index;
            acc = acc + coeff * wp_series(d->lattice, k, order);
        }
        return acc.with_base_point(base);
    }
    if (const auto* t = std::get_if<TrigPotential<S>>(&spec)) {
        // At pi/(2a) the sin and cos terms exchange roles.
        const S& at_sin = pole_index == 0 ? t->alpha1 : t->alpha2;
        const S& at_cos = pole_index == 0 ? t->alpha2 : t->alpha1;
        auto acc = LaurentSeries<S>::constant(zero, t->alpha0, order);
        if (!traits::is_zero(at_sin)) acc = acc + at_sin * inv_sin_sq_series(t->a, order);
        if (!traits::is_zero(at_cos)) acc = acc + at_cos * inv_cos_sq_series(t->a, order);
        return acc.with_base_point(base);
    }
    if (const auto* r = std::get_if<RatPotential<S>>(&spec)) {
        auto acc = LaurentSeries<S>::constant(zero, r->alpha0, order);
        if (!traits::is_zero(r->alpha1)) {
            acc = acc + LaurentSeries<S>::monomial(zero, r->alpha1, -2, order);
        }
        return acc.with_base_point(base);
    }
    const auto& tm = std::get<TrigMultiPotential<S>>(spec);
    auto acc = LaurentSeries<S>::constant(zero, tm.constant, order);
    for (std::size_t j = 0; j < tm.sites.size(); ++j) {
        S cj = detail::triangular<S>(tm.m[j]);
        if (traits::is_zero(cj)) continue;
        if (static_cast<int>(j) == pole_index) {
            acc = acc + cj * inv_sin_sq_series(tm.a, order);
            continue;
        }
        if constexpr (traits::is_exact) {
            throw std::domain_error(
                "trig-multi expansion at an offset site requires floating mode");
        } else {
            // sin(a(t + delta)) = sin(a delta) cos(at) + cos(a delta) sin(at)
            S delta = tm.sites[static_cast<std::size_t>(pole_index)] - tm.sites[j];
            S sa = std::sin(tm.a * delta), ca = std::cos(tm.a * delta);
            auto shifted = sa * cos_series(tm.a, order + 2) + ca * sin_series(tm.a, order + 2);
            auto num = LaurentSeries<S>::constant(zero, cj * tm.a * tm.a, order);
            acc = acc + num / (shifted * shifted);
        }
    }
    return acc.with_base_point(base);
}

/// Taylor expansion at a regular point z*.  Exact mode supports the
/// rational family (whose re-expansion is algebraic); the transcendental
/// families need floating mode.
template <class S>
LaurentSeries<S> potential_taylor_at(const PotentialSpec<S>& spec, const S& zstar,
                                     int order) {
    using traits = scalar_traits<S>;
    const S zero = traits::zero();
    if (const auto* r = std::get_if<RatPotential<S>>(&spec)) {
        S w = zstar - r->shift;
        if (!traits::is_zero(r->alpha1) && traits::magnitude(w) < 1e-12) {
            throw pole_error("potential_taylor_at: z* is the rational pole");
        }
        std::vector<S> c(static_cast<std::size_t>(order) + 1, traits::zero());
        if (!traits::is_zero(r->alpha1)) {
            // alpha1/(w+t)^2 = alpha1 sum (-1)^k (k+1) t^k / w^{k+2}
            S winv = traits::one() / w;
            S term = r->alpha1 * winv * winv;
            for (int k = 0; k <= order; ++k) {
                c[static_cast<std::size_t>(k)] = term * traits::from_int(k % 2 ? -(k + 1) : (k + 1));
                term = term * winv;
            }
        }
        c[0] += r->alpha0;
        return LaurentSeries<S>(zstar, 0, std::move(c));
    }
    if constexpr (traits::is_exact) {
        throw std::domain_error(
            "potential_taylor_at: this family needs floating mode away from poles");
    } else {
        using T = typename traits::real_type;
        if (const auto* d = std::get_if<DtvPotential<S>>(&spec)) {
            if (!d->lattice.omega) {
                throw std::domain_error("potential_taylor_at: lattice has no computed periods");
            }
            auto acc = LaurentSeries<S>::constant(zero, d->alpha[0], order);
            for (int i = 0; i <= 3; ++i) {
                const S& coeff = d->alpha[static_cast<std::size_t>(i == 0 ? 4 : i)];
                if (traits::is_zero(coeff)) continue;
                S w = i == 0 ? S{}
                             : (i < 3 ? (*d->lattice.omega)[static_cast<std::size_t>(i - 1)]
                                      : d->lattice.third_half_period());
                auto [p0, p1] = wp_eval_pair(d->lattice, zstar - d->shift - w);
                // Taylor coefficients of wp from wp'' = 6 wp^2 - g2/2.
                std::vector<S> a(static_cast<std::size_t>(order) + 1, traits::zero());
                a[0] = p0;
                if (order >= 1) a[1] = p1;
                const S half_g2 = d->lattice.g2 / traits::from_int(2);
                for (int k = 0; k + 2 <= order; ++k) {
                    S conv = traits::zero();
                    for (int p = 0; p <= k; ++p) conv += a[static_cast<std::size_t>(p)] * a[static_cast<std::size_t>(k - p)];
                    S rhs = traits::from_int(6) * conv;
                    if (k == 0) rhs -= half_g2;
                    a[static_cast<std::size_t>(k + 2)] = rhs / traits::from_int((k + 1) * (k + 2));
                }
                acc = acc + coeff * LaurentSeries<S>(zero, 0, std::move(a));
            }
            return acc.with_base_point(zstar);
        }
        auto sin_shifted = [&](const S& a, const S& w, int n) {
            // sin(a(w+t)) as a Taylor series in t
            S sa = std::sin(a * w), ca = std::cos(a * w);
            return sa * cos_series(a, n) + ca * sin_series(a, n);
        };
        if (const auto* t = std::get_if<TrigPotential<S>>(&spec)) {
            S w = zstar - t->shift;
            auto acc = LaurentSeries<S>::constant(zero, t->alpha0, order);
            const S a2 = t->a * t->a;
            if (!traits::is_zero(t->alpha1)) {
                auto s = sin_shifted(t->a, w, order + 2);
                if (std::abs(std::sin(t->a * w)) < T(1e-10)) {
                    throw pole_error("potential_taylor_at: z* is a sin pole");
                }
                acc = acc + LaurentSeries<S>::constant(zero, t->alpha1 * a2, order) / (s * s);
            }
            if (!traits::is_zero(t->alpha2)) {
                S caw = std::cos(t->a * w);
                if (std::abs(caw) < T(1e-10)) {
                    throw pole_error("potential_taylor_at: z* is a cos pole");
                }
                S saw = std::sin(t->a * w);
                auto c = caw * cos_series(t->a, order + 2) - saw * sin_series(t->a, order + 2);
                acc = acc + LaurentSeries<S>::constant(zero, t->alpha2 * a2, order) / (c * c);
            }
            return acc.with_base_point(zstar);
        }
        const auto& tm = std::get<TrigMultiPotential<S>>(spec);
        auto acc = LaurentSeries<S>::constant(zero, tm.constant, order);
        for (std::size_t j = 0; j < tm.sites.size(); ++j) {
            S cj = detail::triangular<S>(tm.m[j]);
            if (traits::is_zero(cj)) continue;
            S w = zstar - tm.sites[j];
            if (std::abs(std::sin(tm.a * w)) < T(1e-10)) {
                throw pole_error("potential_taylor_at: z* is a site pole");
            }
            auto s = sin_shifted(tm.a, w, order + 2);
            acc = acc + LaurentSeries<S>::constant(zero, cj * tm.a * tm.a, order) / (s * s);
        }
        return acc.with_base_point(zstar);
    }
}

/// Pointwise evaluation (floating mode).
template <class T>
std::complex<T> potential_eval(const PotentialSpec<std::complex<T>>& spec,
                               std::complex<T> z) {
    using C = std::complex<T>;
    if (const auto* d = std::get_if<DtvPotential<C>>(&spec)) {
        if (!d->lattice.omega) {
            throw std::domain_error("potential_eval: lattice has no computed periods");
        }
        C zz = z - d->shift;
        C acc = d->alpha[0];
        if (!(d->alpha[4] == C{})) acc += d->alpha[4] * wp_eval(d->lattice, zz);
        for (int i = 1; i <= 3; ++i) {
            const C& a = d->alpha[static_cast<std::size_t>(i)];
            if (a == C{}) continue;
            C w = i < 3 ? (*d->lattice.omega)[static_cast<std::size_t>(i - 1)]
                        : d->lattice.third_half_period();
            acc += a * wp_eval(d->lattice, zz - w);
        }
        return acc;
    }
    if (const auto* t = std::get_if<TrigPotential<C>>(&spec)) {
        C zz = z - t->shift;
        C s = std::sin(t->a * zz), c = std::cos(t->a * zz);
        C a2 = t->a * t->a;
        C acc = t->alpha0;
        if (!(t->alpha1 == C{})) {
            if (std::abs(s) < 1e-12) throw pole_error("potential_eval: at a sin pole");
            acc += t->alpha1 * a2 / (s * s);
        }
        if (!(t->alpha2 == C{})) {
            if (std::abs(c) < 1e-12) throw pole_error("potential_eval: at a cos pole");
            acc += t->alpha2 * a2 / (c * c);
        }
        return acc;
    }
    if (const auto* r = std::get_if<RatPotential<C>>(&spec)) {
        C zz = z - r->shift;
        if (!(r->alpha1 == C{}) && std::abs(zz) < 1e-14) {
            throw pole_error("potential_eval: at the rational pole");
        }
        return r->alpha0 + (r->alpha1 == C{} ? C{} : r->alpha1 / (zz * zz));
    }
    const auto& tm = std::get<TrigMultiPotential<C>>(spec);
    C acc = tm.constant;
    for (std::size_t j = 0; j < tm.sites.size(); ++j) {
        C cj = detail::triangular<C>(tm.m[j]);
        if (cj == C{}) continue;
        C s = std::sin(tm.a * (z - tm.sites[j]));
        if (std::abs(s) < 1e-12) throw pole_error("potential_eval: at a site pole");
        acc += cj * tm.a * tm.a / (s * s);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Degenerations: one period to infinity gives the trigonometric family,
// both periods the rational one.

enum class Degeneration { one_period, both_periods };

template <class S>
PotentialSpec<S> degenerate(const PotentialSpec<S>& spec, Degeneration dir) {
    using traits = scalar_traits<S>;
    const auto* d = std::get_if<DtvPotential<S>>(&spec);
    if (!d) throw std::invalid_argument("degenerate: spec must be a DTV potential");
    if (!d->m) throw std::invalid_argument("degenerate: spec must carry integer labels");
    if (dir == Degeneration::both_periods) {
        RatPotential<S> r;
        r.alpha0 = d->alpha[0];
        r.alpha1 = d->alpha[4];
        r.m = (*d->m)[0];
        r.shift = d->shift;
        return r;
    }
    if constexpr (traits::is_exact) {
        throw std::domain_error("one-period degeneration requires floating mode");
    } else {
        if (!d->lattice.omega || !d->lattice.reduced_periods) {
            throw std::domain_error("degenerate: lattice has no computed periods");
        }
        using T = typename traits::real_type;
        using C = std::complex<T>;
        // Surviving half-period: the class of e[2], reduced to its
        // representative nearest the origin.
        C ws = (*d->lattice.omega)[0] + (*d->lattice.omega)[1];
        const C p1 = (*d->lattice.reduced_periods)[0];
        const C p2 = (*d->lattice.reduced_periods)[1];
        const T a11 = p1.real(), a12 = p2.real(), a21 = p1.imag(), a22 = p2.imag();
        const T det = a11 * a22 - a12 * a21;
        const T x = (a22 * ws.real() - a12 * ws.imag()) / det;
        const T y = (-a21 * ws.real() + a11 * ws.imag()) / det;
        ws -= T(std::llround(static_cast<double>(x))) * p1 +
              T(std::llround(static_cast<double>(y))) * p2;
        // The potential is even in a; fix the sign for reproducibility.
        if (ws.real() < T(0) || (ws.real() == T(0) && ws.imag() < T(0))) ws = -ws;
        C a = C(T(M_PI)) / (T(2) * ws);
        TrigPotential<S> t;
        t.a = a;
        t.alpha1 = d->alpha[4];
        t.alpha2 = d->alpha[3];
        C asum = d->alpha[1] + d->alpha[2] + d->alpha[3] + d->alpha[4];
        t.alpha0 = d->alpha[0] - a * a / T(3) * asum;
        t.m = std::array<long, 2>{(*d->m)[0], (*d->m)[3]};
        t.shift = d->shift;
        return t;
    }
}

// ---------------------------------------------------------------------------
// Jacobi-form potentials

template <class T>
struct JacobiFormResult {
    PotentialSpec<std::complex<T>> spec;
    std::complex<T> lambda_shift; // u_jacobi(z) = u_weierstrass(z) + lambda_shift
};

/// Direct evaluation of the Jacobi-form potential
///   m0(m0+1)/sn^2 + m1(m1+1) dn^2/cn^2 + m2(m2+1) k^2 cn^2/dn^2
///   + m3(m3+1) k^2 sn^2.
template <class T>
std::complex<T> jacobi_form_eval(const std::array<long, 4>& m, T k, std::complex<T> z) {
    using C = std::complex<T>;
    auto j = jacobi_eval(k, z);
    auto tri = [](long mi) { return T(mi) * T(mi + 1); };
    C acc{};
    acc += tri(m[0]) / (j.sn * j.sn);
    acc += tri(m[1]) * (j.dn * j.dn) / (j.cn * j.cn);
    acc += tri(m[2]) * T(k) * T(k) * (j.cn * j.cn) / (j.dn * j.dn);
    acc += tri(m[3]) * T(k) * T(k) * (j.sn * j.sn);
    return acc;
}

/// Rewrites the Jacobi-form equation on the Weierstrass side.  With the
/// standard normalization e1 - e3 = 1 no argument rescaling is needed:
/// the lattice has half-periods (K, iK') and
///   1/sn^2(z)         = wp(z) - e3          (pole at 0)
///   dn^2/cn^2(z)      = wp(z - K) - e3      (pole at K)
///   k^2 cn^2/dn^2(z)  = wp(z - K - iK') - e3
///   k^2 sn^2(z)       = wp(z - iK') - e3,
/// so u_jacobi = u_dtv + lambda_shift with lambda_shift = -e3 * sum(alpha).
template <class T>
JacobiFormResult<T> jacobi_to_weierstrass(const std::array<long, 4>& m, T k) {
    using C = std::complex<T>;
    if (!(k > T(0) && k < T(1))) {
        throw std::domain_error("jacobi_to_weierstrass: k must lie in (0, 1)");
    }
    for (long mi : m) {
        if (mi < 0) throw std::invalid_argument("jacobi_to_weierstrass: labels must be >= 0");
    }
    const T k2 = k * k;
    const T e1 = (T(2) - k2) / T(3);
    const T e2 = (T(2) * k2 - T(1)) / T(3);
    const T e3 = -(T(1) + k2) / T(3);
    const C g2 = C(T(-4) * (e1 * e2 + e1 * e3 + e2 * e3));
    const C g3 = C(T(4) * e1 * e2 * e3);
    auto lat = lattice_from_invariants<C>(g2, g3);
    // Ascending real roots: lat.e = (e3, e2, e1).  The Jacobi poles land
    // at: m0 -> origin, m1 -> class of e1 (omega3), m2 -> class of e2
    // (omega2), m3 -> class of e3 (omega1).
    DtvPotential<C> p;
    p.lattice = std::move(lat);
    p.alpha[4] = detail::triangular<C>(m[0]);
    p.alpha[1] = detail::triangular<C>(m[3]);
    p.alpha[2] = detail::triangular<C>(m[2]);
    p.alpha[3] = detail::triangular<C>(m[1]);
    p.m = std::array<long, 4>{m[0], m[3], m[2], m[1]};
    C asum = p.alpha[1] + p.alpha[2] + p.alpha[3] + p.alpha[4];
    JacobiFormResult<T> out{std::move(p), -C(e3) * asum};
    return out;
}

} // namespace dtv
