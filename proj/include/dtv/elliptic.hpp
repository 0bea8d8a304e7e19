#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "dtv/errors.hpp"
#include "dtv/lattice_reduce.hpp"
#include "dtv/scalar.hpp"
#include "dtv/series.hpp"

namespace dtv {

inline constexpr int kDefaultSeriesOrder = 64;
inline constexpr int kEisensteinRange = 40;

/// An elliptic curve presented by its period lattice.  e[i] are the roots
/// of 4t^3 - g2 t - g3 in lexicographic order (real part, then imaginary),
/// and omega — when present — are half-periods matched so that
/// wp(omega[i]) = e[i], with the third half-period omega[0]+omega[1].
/// Exact-mode lattices carry no periods (they are transcendental); the
/// floating builders fill them in.
template <class S>
struct Lattice {
    S g2{}, g3{};
    std::array<S, 3> e{};
    S discriminant{};
    std::optional<std::array<S, 2>> omega;

    /// Reported accuracy of (g2, g3, e): near machine precision for
    /// invariant-built lattices, the Eisenstein tail bound for
    /// period-built ones.
    double tolerance = 0;

    /// Lagrange-reduced basis of the full period lattice {2m w1 + 2n w2}
    /// and the length of its shortest vector (floating mode).
    std::optional<std::array<S, 2>> reduced_periods;
    double r_min = 0;

    /// Expansion at the origin cached at construction in floating mode so
    /// pointwise evaluation does not recompute it.
    std::optional<LaurentSeries<S>> wp0_cache;

    S third_half_period() const {
        if (!omega) throw std::domain_error("lattice has no computed periods (exact mode)");
        return (*omega)[0] + (*omega)[1];
    }
};

namespace detail {

/// Carlson symmetric integral R_F by the standard duplication iteration,
/// usable for complex arguments away from the branch-cut pathologies.
template <class T>
std::complex<T> carlson_rf(std::complex<T> x, std::complex<T> y, std::complex<T> z) {
    using C = std::complex<T>;
    C mu = (x + y + z) / T(3);
    for (int iter = 0; iter < 200; ++iter) {
        C sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        C lam = sx * sy + sy * sz + sz * sx;
        x = (x + lam) * T(0.25);
        y = (y + lam) * T(0.25);
        z = (z + lam) * T(0.25);
        mu = (x + y + z) / T(3);
        T err = std::max({std::abs(x - mu), std::abs(y - mu), std::abs(z - mu)});
        if (err <= T(1e-14) * std::abs(mu)) break;
    }
    C dx = (mu - x) / mu, dy = (mu - y) / mu, dz = -(dx + dy);
    C e2 = dx * dy - dz * dz;
    C e3 = dx * dy * dz;
    return (T(1) + (e2 / T(24) - T(0.1) - e3 * T(3.0 / 44.0)) * e2 + e3 / T(14)) /
           std::sqrt(mu);
}

/// Roots of the depressed cubic 4t^3 - g2 t - g3 (Cardano, complex).
template <class T>
std::array<std::complex<T>, 3> weierstrass_cubic_roots(std::complex<T> g2,
                                                       std::complex<T> g3) {
    using C = std::complex<T>;
    const C p = -g2 / T(4), q = -g3 / T(4);
    std::array<C, 3> roots;
    const C disc = q * q / T(4) + p * p * p / T(27);
    const C sq = std::sqrt(disc);
    C c1 = std::pow(-q / T(2) + sq, T(1) / T(3));
    C c2 = std::pow(-q / T(2) - sq, T(1) / T(3));
    C big = std::abs(c1) >= std::abs(c2) ? c1 : c2;
    if (std::abs(big) == T(0)) {
        // p == q == 0
        roots = {C(0), C(0), C(0)};
        return roots;
    }
    const C w(T(-0.5), std::sqrt(T(3)) / T(2));
    C u = C(1);
    for (int i = 0; i < 3; ++i) {
        C cc = big * u;
        roots[static_cast<std::size_t>(i)] = cc - p / (T(3) * cc);
        u *= w;
    }
    // Two Newton polish steps on 4t^3 - g2 t - g3.
    for (auto& r : roots) {
        for (int it = 0; it < 2; ++it) {
            C f = T(4) * r * r * r - g2 * r - g3;
            C fp = T(12) * r * r - g2;
            if (std::abs(fp) > T(0)) r -= f / fp;
        }
    }
    return roots;
}

template <class T>
bool lex_less(const std::complex<T>& a, const std::complex<T>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

inline bool lex_less_exact(const ExactScalar& a, const ExactScalar& b) {
    if (a.re() != b.re()) return a.re() < b.re();
    return a.im() < b.im();
}

/// Nearest rational with denominator <= max_den, if within tol; used to
/// recognize exact half-period values from floating root estimates.
inline std::optional<mpq_class> rationalize(double x, double tol = 1e-9,
                                            long max_den = 1000000) {
    if (!std::isfinite(x)) return std::nullopt;
    double v = x;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 40; ++it) {
        double fl = std::floor(v);
        if (fl > 9e17 || fl < -9e17) return std::nullopt;
        long long a = static_cast<long long>(fl);
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - x) <= tol * std::max(1.0, std::abs(x))) {
            return mpq_class(static_cast<long>(p1), static_cast<long>(q1));
        }
        double frac = v - fl;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    return std::nullopt;
}

/// Direct corrected lattice sum for wp, used to validate period/root
/// pairings at construction time (independent of the series-plus-
/// duplication evaluator, and in particular of any provisional pairing).
template <class T>
std::complex<T> wp_direct_sum(std::complex<T> w1, std::complex<T> w2,
                              std::complex<T> g2, std::complex<T> g3,
                              std::complex<T> z, int range) {
    using C = std::complex<T>;
    C z2 = z * z;
    C acc = T(1) / z2 + g2 / T(20) * z2 + g3 / T(28) * z2 * z2;
    for (int m = -range; m <= range; ++m) {
        for (int n = -range; n <= range; ++n) {
            if (m == 0 && n == 0) continue;
            C w = T(2) * (T(m) * w1 + T(n) * w2);
            C iw2 = T(1) / (w * w);
            C iw4 = iw2 * iw2;
            acc += T(1) / ((z - w) * (z - w)) - iw2 - T(3) * z2 * iw4 -
                   T(5) * z2 * z2 * iw4 * iw2;
        }
    }
    return acc;
}

/// Eisenstein sums over max(|m|,|n|) <= range, with a crude integral tail
/// bound.  Returns (g2, g3, error_bound).
template <class T>
std::tuple<std::complex<T>, std::complex<T>, double>
eisenstein_invariants(std::complex<T> w1, std::complex<T> w2, int range) {
    using C = std::complex<T>;
    C s4{}, s6{};
    for (int m = -range; m <= range; ++m) {
        for (int n = -range; n <= range; ++n) {
            if (m == 0 && n == 0) continue;
            C w = T(2) * (T(m) * w1 + T(n) * w2);
            C w2i = T(1) / (w * w);
            C w4 = w2i * w2i;
            s4 += w4;
            s6 += w4 * w2i;
        }
    }
    C g2 = T(60) * s4;
    C g3 = T(140) * s6;
    auto [r1, r2] = lagrange_reduce(T(2) * w1, T(2) * w2);
    double shortest = std::abs(r2) > 0 ? std::abs(r1) : 0.0;
    double covol = std::abs((std::conj(r1) * r2).imag());
    double tail4 = 0, tail6 = 0;
    if (shortest > 0 && covol > 0) {
        double radius = shortest * range;
        tail4 = 60.0 * M_PI / (covol * radius * radius);
        tail6 = 70.0 * M_PI / (covol * std::pow(radius, 4));
    }
    double bound = 4.0 * std::max(tail4, tail6);
    return {g2, g3, bound};
}

} // namespace detail

/// Expansion of wp about the origin (principal part 1/t^2) or about a
/// half-period (even Taylor series seeded by the corresponding root).
/// center: 0 for the origin, 1..3 for omega_1..omega_3.
template <class S>
LaurentSeries<S> wp_series(const Lattice<S>& lat, int center, int order) {
    using traits = scalar_traits<S>;
    if (order < 2) {
        throw truncation_error("wp_series: order must be at least 2", 2);
    }
    if (center == 0) {
        if (lat.wp0_cache && lat.wp0_cache->trunc_order() >= order) {
            return lat.wp0_cache->truncated(order);
        }
        // wp = t^-2 + sum_{k>=2} c_k t^{2k-2};
        // c_2 = g2/20, c_3 = g3/28, then the quadratic recursion induced
        // by the Weierstrass differential equation.
        const int kmax = order / 2 + 1;
        std::vector<S> c(static_cast<std::size_t>(kmax) + 1, traits::zero());
        if (kmax >= 2) c[2] = lat.g2 / traits::from_int(20);
        if (kmax >= 3) c[3] = lat.g3 / traits::from_int(28);
        for (int k = 4; k <= kmax; ++k) {
            S acc = traits::zero();
            for (int m = 2; m <= k - 2; ++m) {
                acc += c[static_cast<std::size_t>(m)] * c[static_cast<std::size_t>(k - m)];
            }
            c[static_cast<std::size_t>(k)] =
                traits::from_int(3) * acc /
                traits::from_int((2 * k + 1) * (k - 3));
        }
        std::vector<S> coeffs(static_cast<std::size_t>(order + 3), traits::zero());
        coeffs[0] = traits::one(); // t^-2
        for (int k = 2; k <= kmax; ++k) {
            int deg = 2 * k - 2;
            if (deg <= order) coeffs[static_cast<std::size_t>(deg + 2)] = c[static_cast<std::size_t>(k)];
        }
        return LaurentSeries<S>(traits::zero(), -2, std::move(coeffs));
    }
    if (center < 1 || center > 3) {
        throw std::invalid_argument("wp_series: center must be 0..3");
    }
    // Even Taylor series from wp'' = 6 wp^2 - g2/2, seeded by (e_i, 0).
    const S& ei = lat.e[static_cast<std::size_t>(center - 1)];
    std::vector<S> a(static_cast<std::size_t>(order) + 1, traits::zero());
    a[0] = ei;
    const S half_g2 = lat.g2 / traits::from_int(2);
    for (int k = 0; k + 2 <= order; ++k) {
        S conv = traits::zero();
        for (int p = 0; p <= k; ++p) {
            conv += a[static_cast<std::size_t>(p)] * a[static_cast<std::size_t>(k - p)];
        }
        S rhs = traits::from_int(6) * conv;
        if (k == 0) rhs -= half_g2;
        a[static_cast<std::size_t>(k + 2)] = rhs / traits::from_int((k + 1) * (k + 2));
    }
    return LaurentSeries<S>(traits::zero(), 0, std::move(a));
}

namespace detail {

template <class S>
LaurentSeries<S> wp0_with_cache(const Lattice<S>& lat, int order) {
    return wp_series(lat, 0, order);
}

/// One step of the algebraic duplication for the pair (wp, wp').
template <class S>
std::pair<S, S> wp_duplicate(const Lattice<S>& lat, const S& p, const S& pp) {
    using traits = scalar_traits<S>;
    const S four = traits::from_int(4);
    const S quarter_g2 = lat.g2 / four;
    const S num = (p * p + quarter_g2) * (p * p + quarter_g2) +
                  traits::from_int(2) * lat.g3 * p;
    const S den = four * p * p * p - lat.g2 * p - lat.g3;
    const S nump = four * p * (p * p + quarter_g2) + traits::from_int(2) * lat.g3;
    const S denp = traits::from_int(12) * p * p - lat.g2;
    const S p2 = num / den;
    const S pp2 = ((nump * den - num * denp) / (den * den)) * pp / traits::from_int(2);
    return {p2, pp2};
}

} // namespace detail

/// Pointwise (wp, wp') by reduction to the fundamental cell followed by
/// series evaluation: directly at the origin when the reduced point is
/// close, through the even half-period expansion when it is close to a
/// half-period (duplication from a quarter period is ill-conditioned for
/// strongly anisotropic lattices), and otherwise by halving plus pair
/// duplication.
template <class T>
std::pair<std::complex<T>, std::complex<T>> wp_eval_pair(
    const Lattice<std::complex<T>>& lat, std::complex<T> z) {
    using C = std::complex<T>;
    if (!lat.omega || !lat.reduced_periods) {
        throw std::domain_error("wp_eval: lattice has no computed periods");
    }
    const C p1 = (*lat.reduced_periods)[0], p2 = (*lat.reduced_periods)[1];
    const T a = p1.real(), b = p2.real(), c = p1.imag(), d = p2.imag();
    const T det = a * d - b * c;
    auto reduce = [&](C v) {
        const T x = (d * v.real() - b * v.imag()) / det;
        const T y = (-c * v.real() + a * v.imag()) / det;
        return v - T(std::llround(static_cast<double>(x))) * p1 -
               T(std::llround(static_cast<double>(y))) * p2;
    };
    C t = reduce(z);
    const double rmin = lat.r_min;
    if (std::abs(t) <= 1e-10 * rmin) {
        throw pole_error("wp_eval: argument is a lattice point");
    }

    // Nearest half-period class representative.
    int best_sig = -1;
    C best_delta{};
    double best_dist = 1e300;
    for (int sig = 1; sig <= 3; ++sig) {
        C h = (T(sig & 1) * p1 + T((sig >> 1) & 1) * p2) / T(2);
        C delta = reduce(t - h);
        double dist = static_cast<double>(std::abs(delta));
        if (dist < best_dist) {
            best_dist = dist;
            best_sig = sig;
            best_delta = delta;
        }
    }
    if (best_dist <= 0.3 * rmin) {
        // Identify which stored root this class carries: classes are the
        // parities of the full-period coordinates of twice the half-period.
        auto signature_of = [&](C w) {
            C two_w = T(2) * w;
            const T x = (d * two_w.real() - b * two_w.imag()) / det;
            const T y = (-c * two_w.real() + a * two_w.imag()) / det;
            long sx = std::llround(static_cast<double>(x));
            long sy = std::llround(static_cast<double>(y));
            return static_cast<int>(((sx % 2 + 2) % 2) + 2 * ((sy % 2 + 2) % 2));
        };
        for (int i = 1; i <= 3; ++i) {
            C wi = i < 3 ? (*lat.omega)[static_cast<std::size_t>(i - 1)]
                         : (*lat.omega)[0] + (*lat.omega)[1];
            if (signature_of(wi) == best_sig) {
                auto s = wp_series(lat, i, kDefaultSeriesOrder);
                return {evaluate(s, best_delta), evaluate(derivative(s), best_delta)};
            }
        }
    }

    int halvings = 0;
    while (static_cast<double>(std::abs(t)) > 0.35 * rmin * std::pow(2.0, halvings) &&
           halvings < 40) {
        ++halvings;
    }
    const C u = t / T(std::pow(2.0, halvings));
    std::optional<LaurentSeries<C>> own;
    const LaurentSeries<C>* s = lat.wp0_cache ? &*lat.wp0_cache : nullptr;
    if (!s) {
        own = wp_series(lat, 0, kDefaultSeriesOrder);
        s = &*own;
    }
    C p = evaluate(*s, u);
    C pp = evaluate(derivative(*s), u);
    for (int i = 0; i < halvings; ++i) {
        auto [np, npp] = detail::wp_duplicate(lat, p, pp);
        p = np;
        pp = npp;
    }
    return {p, pp};
}

template <class T>
std::complex<T> wp_eval(const Lattice<std::complex<T>>& lat, std::complex<T> z) {
    return wp_eval_pair(lat, z).first;
}

/// Builds a lattice from invariants.  Floating mode computes half-periods
/// via Carlson integrals; exact mode recognizes lattices whose
/// half-period values are Gaussian rationals and refuses the rest.
template <class S>
Lattice<S> lattice_from_invariants(S g2, S g3) {
    using traits = scalar_traits<S>;
    Lattice<S> lat;
    lat.g2 = g2;
    lat.g3 = g3;
    lat.discriminant = g2 * g2 * g2 - traits::from_int(27) * g3 * g3;
    if (traits::is_zero(lat.discriminant)) {
        throw std::domain_error(
            "degenerate lattice (zero discriminant): use the trigonometric or "
            "rational families instead");
    }
    if constexpr (traits::is_exact) {
        auto froots = detail::weierstrass_cubic_roots<double>(
            traits::to_complex(g2), traits::to_complex(g3));
        std::array<S, 3> roots;
        for (int i = 0; i < 3; ++i) {
            auto re = detail::rationalize(froots[static_cast<std::size_t>(i)].real());
            auto im = detail::rationalize(froots[static_cast<std::size_t>(i)].imag());
            if (!re || !im) {
                throw std::domain_error(
                    "half-period values are not Gaussian rationals; build this "
                    "lattice in floating mode");
            }
            roots[static_cast<std::size_t>(i)] = ExactScalar(*re, *im);
        }
        // Verify the reconstruction exactly against the cubic's symmetric
        // functions; the floating estimates only guided the guess.
        S sum = roots[0] + roots[1] + roots[2];
        S pair_sum = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2];
        S prod = roots[0] * roots[1] * roots[2];
        const S four = traits::from_int(4);
        if (!traits::is_zero(sum) || !(pair_sum * (-four) == g2) || !(prod * four == g3)) {
            throw std::domain_error(
                "half-period values are not Gaussian rationals; build this "
                "lattice in floating mode");
        }
        std::sort(roots.begin(), roots.end(), detail::lex_less_exact);
        lat.e = roots;
        lat.tolerance = 0;
        return lat;
    } else {
        using T = typename traits::real_type;
        using C = std::complex<T>;
        auto roots = detail::weierstrass_cubic_roots<T>(g2, g3);
        std::sort(roots.begin(), roots.end(), detail::lex_less<T>);
        lat.e = {roots[0], roots[1], roots[2]};
        // Half-period attached to root e_i as a complete elliptic integral.
        auto half_period = [&](int i, int j, int k) {
            return detail::carlson_rf<T>(C(0), roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)],
                                         roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(k)]);
        };
        C w1 = half_period(0, 1, 2);
        C w2 = half_period(1, 0, 2);
        if ((std::conj(w1) * w2).imag() < 0) w2 = -w2;
        if (std::abs((std::conj(w1) * w2).imag()) <=
            1e-12 * std::abs(w1) * std::abs(w2)) {
            throw std::domain_error("period computation failed: collinear half-periods");
        }
        lat.omega = {w1, w2};
        auto [rp1, rp2] = lagrange_reduce(T(2) * w1, T(2) * w2);
        lat.reduced_periods = {rp1, rp2};
        lat.r_min = static_cast<double>(std::abs(rp1));
        lat.tolerance = 1e-12;
        lat.wp0_cache = wp_series(lat, 0, kDefaultSeriesOrder);
        // Cross-check against direct lattice sums: a wrong (non-primitive)
        // basis would change the invariants by an enormous factor.
        auto [eg2, eg3, bound] = detail::eisenstein_invariants<T>(w1, w2, kEisensteinRange);
        double scale = std::max({static_cast<double>(std::abs(g2)),
                                 static_cast<double>(std::abs(g3)), 1.0e-30});
        if (static_cast<double>(std::abs(eg2 - g2)) > 0.05 * scale + 10 * bound ||
            static_cast<double>(std::abs(eg3 - g3)) > 0.05 * scale + 10 * bound) {
            throw std::domain_error("period computation failed the lattice-sum cross-check");
        }
        // And the half-period values themselves, by the direct sum so the
        // check does not depend on the pairing being verified.
        for (int i = 0; i < 3; ++i) {
            C wi = i == 0 ? w1 : (i == 1 ? w2 : w1 + w2);
            C val = detail::wp_direct_sum<T>(w1, w2, g2, g3, wi, kEisensteinRange);
            double tol = 1e-6 * std::max(1.0, static_cast<double>(std::abs(
                                                  lat.e[static_cast<std::size_t>(i)])));
            if (static_cast<double>(std::abs(val - lat.e[static_cast<std::size_t>(i)])) > tol) {
                throw std::domain_error("period/root matching failed");
            }
        }
        return lat;
    }
}

/// Builds a lattice from half-periods by truncated Eisenstein sums.
/// The stored periods are the inputs verbatim; the invariants carry the
/// reported tail-bound accuracy.
template <class T>
Lattice<std::complex<T>> lattice_from_periods(std::complex<T> w1, std::complex<T> w2,
                                              int range = kEisensteinRange) {
    using C = std::complex<T>;
    using traits = scalar_traits<C>;
    const auto orient = (std::conj(w1) * w2).imag();
    if (std::abs(orient) <= 1e-12 * std::abs(w1) * std::abs(w2)) {
        throw std::domain_error("period ratio is real: not a lattice");
    }
    if (orient < 0) w2 = -w2;
    Lattice<C> lat;
    auto [g2, g3, bound] = detail::eisenstein_invariants<T>(w1, w2, range);
    lat.g2 = g2;
    lat.g3 = g3;
    lat.discriminant = g2 * g2 * g2 - traits::from_int(27) * g3 * g3;
    auto roots = detail::weierstrass_cubic_roots<T>(g2, g3);
    std::sort(roots.begin(), roots.end(), detail::lex_less<T>);
    lat.e = {roots[0], roots[1], roots[2]};
    lat.tolerance = std::max(bound, 1e-12);
    auto [rp1, rp2] = lagrange_reduce(T(2) * w1, T(2) * w2);
    lat.reduced_periods = {rp1, rp2};
    lat.r_min = static_cast<double>(std::abs(rp1));
    lat.wp0_cache = wp_series(lat, 0, kDefaultSeriesOrder);
    // Match roots to half-periods by the best bijection, judging by the
    // direct lattice sum: it cannot presuppose the pairing.  When two
    // roots sit closer than the attainable accuracy (strongly anisotropic
    // lattices) their labels are interchangeable, so that separation is
    // excused in the acceptance threshold.
    std::array<C, 3> cands = {w1, w2, w1 + w2};
    std::array<std::array<double, 3>, 3> cost{};
    for (int c = 0; c < 3; ++c) {
        C val = detail::wp_direct_sum<T>(w1, w2, g2, g3,
                                         cands[static_cast<std::size_t>(c)], range);
        for (int i = 0; i < 3; ++i) {
            cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
                static_cast<double>(std::abs(val - lat.e[static_cast<std::size_t>(i)]));
        }
    }
    std::array<int, 3> best_perm = {0, 1, 2};
    double best_total = 1e300;
    std::array<int, 3> perm = {0, 1, 2};
    std::sort(perm.begin(), perm.end());
    do {
        double total = cost[0][static_cast<std::size_t>(perm[0])] +
                       cost[1][static_cast<std::size_t>(perm[1])] +
                       cost[2][static_cast<std::size_t>(perm[2])];
        if (total < best_total) {
            best_total = total;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    double scale = std::max({std::abs(lat.e[0]), std::abs(lat.e[1]), std::abs(lat.e[2]), 1.0});
    double min_sep = std::min({std::abs(lat.e[0] - lat.e[1]), std::abs(lat.e[0] - lat.e[2]),
                               std::abs(lat.e[1] - lat.e[2])});
    if (best_total > 30 * lat.tolerance + 1e-6 * scale + 3 * min_sep) {
        throw std::domain_error("period/root matching failed (degenerate lattice?)");
    }
    C o1 = cands[static_cast<std::size_t>(best_perm[0])];
    C o2 = cands[static_cast<std::size_t>(best_perm[1])];
    if ((std::conj(o1) * o2).imag() < 0) o2 = -o2;
    lat.omega = {o1, o2};
    return lat;
}

/// sn, cn, dn at a complex argument for real modulus k in [0, 1].
template <class T>
struct JacobiTriple {
    std::complex<T> sn, cn, dn;
};

namespace detail {

/// Real-argument Jacobi functions by the descending Landen / AGM scheme.
template <class T>
void jacobi_real(T k, T x, T& sn, T& cn, T& dn) {
    if (k == T(0)) {
        sn = std::sin(x);
        cn = std::cos(x);
        dn = T(1);
        return;
    }
    if (k == T(1)) {
        sn = std::tanh(x);
        cn = T(1) / std::cosh(x);
        dn = cn;
        return;
    }
    constexpr int kMax = 32;
    T a[kMax], c[kMax];
    T kp = std::sqrt(T(1) - k * k);
    a[0] = T(1);
    c[0] = k;
    T b = kp;
    int n = 0;
    while (n + 1 < kMax) {
        a[n + 1] = (a[n] + b) / T(2);
        c[n + 1] = (a[n] - b) / T(2);
        b = std::sqrt(a[n] * b);
        ++n;
        if (std::abs(c[n]) <= T(1e-16) * std::abs(a[n])) break;
    }
    T phi = std::ldexp(a[n] * x, n);
    for (int i = n; i >= 1; --i) {
        T s = std::sin(phi);
        T arg = c[i] / a[i] * s;
        arg = std::clamp(arg, T(-1), T(1));
        phi = (phi + std::asin(arg)) / T(2);
    }
    sn = std::sin(phi);
    cn = std::cos(phi);
    dn = std::sqrt(std::max(T(0), T(1) - k * k * sn * sn));
}

} // namespace detail

template <class T>
JacobiTriple<T> jacobi_eval(T k, std::complex<T> z) {
    if (!(k >= T(0) && k <= T(1))) {
        throw std::domain_error("jacobi_eval: modulus must lie in [0, 1]");
    }
    using C = std::complex<T>;
    if (z.imag() == T(0)) {
        T sn, cn, dn;
        detail::jacobi_real(k, z.real(), sn, cn, dn);
        return {C(sn), C(cn), C(dn)};
    }
    // A&S 16.21: assemble the complex value from real-argument pieces at
    // moduli k and k'.
    T kp = std::sqrt(std::max(T(0), T(1) - k * k));
    T s, c, d, s1, c1, d1;
    detail::jacobi_real(k, z.real(), s, c, d);
    detail::jacobi_real(kp, z.imag(), s1, c1, d1);
    T delta = c1 * c1 + k * k * s * s * s1 * s1;
    C i(T(0), T(1));
    C sn = (C(s * d1) + i * C(c * d * s1 * c1)) / C(delta);
    C cn = (C(c * c1) - i * C(s * d * s1 * d1)) / C(delta);
    C dn = (C(d * c1 * d1) - i * C(k * k * s * c * s1)) / C(delta);
    return {sn, cn, dn};
}

/// Complete elliptic integral of the first kind via the AGM.
template <class T>
T elliptic_K(T k) {
    if (!(k >= T(0) && k < T(1))) {
        throw std::domain_error("elliptic_K: modulus must lie in [0, 1)");
    }
    T a = T(1), b = std::sqrt(T(1) - k * k);
    for (int i = 0; i < 60 && std::abs(a - b) > T(1e-16) * a; ++i) {
        T an = (a + b) / T(2);
        b = std::sqrt(a * b);
        a = an;
    }
    return T(M_PI) / (T(2) * a);
}

} // namespace dtv
