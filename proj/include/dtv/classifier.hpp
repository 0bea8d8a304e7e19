#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dtv/lattice_reduce.hpp"
#include "dtv/potentials.hpp"
#include "dtv/scalar.hpp"

namespace dtv {

enum class SingularTag { Rational, Trigonometric, Elliptic, NonDiscrete };

inline const char* to_string(SingularTag t) {
    switch (t) {
        case SingularTag::Rational: return "rational";
        case SingularTag::Trigonometric: return "trigonometric";
        case SingularTag::Elliptic: return "elliptic";
        default: return "non_discrete";
    }
}

/// A reflection-closed singular set: a point, a one-dimensional lattice
/// z0 + omega Z, a two-dimensional lattice z0 + Z b1 + Z b2, or a
/// non-discrete closure (which supports no finite-gap family).
template <class S>
struct SingularClass {
    SingularTag tag = SingularTag::Rational;
    S z0{};
    std::optional<S> omega;
    std::optional<std::array<S, 2>> basis; // Lagrange-reduced, oriented
    bool commensurability_cutoff_hit = false;
};

namespace detail {

inline std::optional<std::pair<long long, long long>>
rational_reconstruct(double x, double tol, long long max_den) {
    if (!std::isfinite(x)) return std::nullopt;
    double v = x;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(v);
        if (std::abs(fl) > 9e17) return std::nullopt;
        long long a = static_cast<long long>(fl);
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den || q2 < 0) return std::nullopt;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <=
            tol * std::max(1.0, std::abs(x))) {
            return std::make_pair(p1, q1);
        }
        double frac = v - fl;
        if (frac < 1e-16) break;
        v = 1.0 / frac;
    }
    return std::nullopt;
}

/// Canonical sign: positive real part, or positive imaginary on the axis.
template <class S>
S canonical_sign(const S& v) {
    auto c = scalar_traits<S>::to_complex(v);
    if (c.real() < 0 || (c.real() == 0 && c.imag() < 0)) return -v;
    return v;
}

/// Z-module basis of integer vectors in Z^2 by column Euclid steps.
inline std::vector<std::array<mpz_class, 2>> integer_lattice_basis(
    std::vector<std::array<mpz_class, 2>> cols) {
    auto nonzero = [](const std::array<mpz_class, 2>& c) {
        return c[0] != 0 || c[1] != 0;
    };
    // Stage 1: gcd out the first row.
    for (;;) {
        int pivot = -1;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (cols[i][0] == 0) continue;
            if (pivot < 0 || abs(cols[i][0]) < abs(cols[static_cast<std::size_t>(pivot)][0])) {
                pivot = static_cast<int>(i);
            }
        }
        if (pivot < 0) break;
        bool more = false;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (static_cast<int>(i) == pivot || cols[i][0] == 0) continue;
            mpz_class q;
            mpz_class num = cols[i][0], den = cols[static_cast<std::size_t>(pivot)][0];
            // nearest-integer quotient keeps the remainders shrinking
            mpz_class twice = 2 * num + den;
            mpz_fdiv_q(q.get_mpz_t(), twice.get_mpz_t(), mpz_class(2 * den).get_mpz_t());
            cols[i][0] -= q * den;
            cols[i][1] -= q * cols[static_cast<std::size_t>(pivot)][1];
            if (cols[i][0] != 0) more = true;
        }
        if (!more) {
            // Stage 2: gcd the second row among columns with zero first row.
            std::array<mpz_class, 2> b1 = cols[static_cast<std::size_t>(pivot)];
            mpz_class g = 0;
            for (const auto& c : cols) {
                if (c[0] == 0) g = gcd(g, c[1]);
            }
            std::vector<std::array<mpz_class, 2>> basis;
            basis.push_back(b1);
            if (g != 0) basis.push_back({mpz_class(0), g});
            return basis;
        }
    }
    // First row entirely zero.
    mpz_class g = 0;
    for (const auto& c : cols) g = gcd(g, c[1]);
    std::vector<std::array<mpz_class, 2>> basis;
    if (g != 0) basis.push_back({mpz_class(0), g});
    (void)nonzero;
    return basis;
}

} // namespace detail

/// Classifies a finite generating set of singular points by the structure
/// of the additive group generated by the differences z_i - z_0 (the
/// reflection closure of the input is z_0 plus that group).
template <class S>
SingularClass<S> classify_singular_set(const std::vector<S>& points,
                                       double eps = 1e-9,
                                       long long commensurability_cutoff = 1000000) {
    using traits = scalar_traits<S>;
    if (points.empty()) {
        throw std::domain_error("classify_singular_set: empty point set");
    }
    SingularClass<S> cls;
    cls.z0 = points[0];
    std::vector<S> gens;
    for (std::size_t i = 1; i < points.size(); ++i) {
        gens.push_back(points[i] - points[0]);
    }

    if constexpr (traits::is_exact) {
        // Clear denominators: the group of Gaussian-rational generators is
        // (1/q) times an integer lattice.
        mpz_class q(1);
        for (const auto& g : gens) {
            q = lcm(q, g.re().get_den());
            q = lcm(q, g.im().get_den());
        }
        std::vector<std::array<mpz_class, 2>> cols;
        for (const auto& g : gens) {
            mpz_class x = g.re().get_num() * (q / g.re().get_den());
            mpz_class y = g.im().get_num() * (q / g.im().get_den());
            if (x != 0 || y != 0) cols.push_back({x, y});
        }
        auto basis = detail::integer_lattice_basis(std::move(cols));
        if (basis.empty()) {
            cls.tag = SingularTag::Rational;
            return cls;
        }
        auto to_scalar = [&](const std::array<mpz_class, 2>& v) {
            return S(mpq_class(v[0], q), mpq_class(v[1], q));
        };
        if (basis.size() == 1) {
            cls.tag = SingularTag::Trigonometric;
            cls.omega = detail::canonical_sign(to_scalar(basis[0]));
            return cls;
        }
        auto [b1, b2] = lagrange_reduce(to_scalar(basis[0]), to_scalar(basis[1]));
        b1 = detail::canonical_sign(b1);
        b2 = detail::canonical_sign(b2);
        // Oriented: Im(b2/b1) > 0.
        if ((b1.conj() * b2).im() < 0) b2 = -b2;
        cls.tag = SingularTag::Elliptic;
        cls.basis = {b1, b2};
        return cls;
    } else {
        double scale = 0;
        for (const auto& g : gens) scale = std::max(scale, traits::magnitude(g));
        const double tol = eps * scale;
        std::vector<S> live;
        for (const auto& g : gens) {
            if (traits::magnitude(g) > tol) live.push_back(g);
        }
        if (live.empty()) {
            cls.tag = SingularTag::Rational;
            return cls;
        }
        // Direction of the largest generator decides line vs plane.
        S gmax = live[0];
        for (const auto& g : live) {
            if (traits::magnitude(g) > traits::magnitude(gmax)) gmax = g;
        }
        bool collinear = true;
        for (const auto& g : live) {
            auto cross = (traits::conj(gmax) * g);
            double perp = std::abs(traits::to_complex(cross).imag());
            if (perp > tol * traits::magnitude(gmax)) {
                collinear = false;
                break;
            }
        }
        if (collinear) {
            // Ratios along the line must be commensurable; gcd them.  The
            // reconstruction tolerance sits just above the double-precision
            // noise floor: a genuine rational ratio matches its convergent
            // to ~1e-16, while an irrational's convergents only close in
            // like 1/q^2 and run past the denominator cutoff first.
            constexpr double kCommensurabilityTol = 3e-13;
            mpz_class gnum = 0, glcm = 1;
            for (const auto& g : live) {
                auto ratio = traits::to_complex(g * (traits::one() / gmax));
                auto pq = detail::rational_reconstruct(ratio.real(), kCommensurabilityTol,
                                                       commensurability_cutoff);
                if (!pq) {
                    cls.tag = SingularTag::NonDiscrete;
                    cls.commensurability_cutoff_hit = true;
                    return cls;
                }
                gnum = gcd(gnum, mpz_class(static_cast<long>(pq->first)));
                glcm = lcm(glcm, mpz_class(static_cast<long>(pq->second)));
            }
            mpq_class step(gnum, glcm);
            step.canonicalize();
            cls.tag = SingularTag::Trigonometric;
            cls.omega = detail::canonical_sign(S(step.get_d()) * gmax);
            return cls;
        }
        // Plane case: greedy two-dimensional gcd sweeps.
        std::vector<S> vecs = live;
        std::array<S, 2> basis{};
        bool have_basis = false;
        for (int round = 0; round < 64 && !have_basis; ++round) {
            std::sort(vecs.begin(), vecs.end(), [&](const S& a, const S& b) {
                return traits::magnitude(a) < traits::magnitude(b);
            });
            // Shortest vector, then the shortest independent one.
            const S b1 = vecs[0];
            std::optional<S> b2;
            for (const auto& v : vecs) {
                double perp = std::abs(traits::to_complex(traits::conj(b1) * v).imag());
                if (perp > tol * traits::magnitude(b1)) {
                    b2 = v;
                    break;
                }
            }
            if (!b2) {
                // Collapsed to a line: the plane-rank test was noise-level.
                cls.tag = SingularTag::NonDiscrete;
                cls.commensurability_cutoff_hit = true;
                return cls;
            }
            // Reduce everything modulo (b1, b2) by nearest lattice point.
            auto c1 = traits::to_complex(b1), c2 = traits::to_complex(*b2);
            double det = c1.real() * c2.imag() - c2.real() * c1.imag();
            bool changed = false;
            std::vector<S> next = {b1, *b2};
            for (const auto& v : vecs) {
                auto cv = traits::to_complex(v);
                double x = (cv.real() * c2.imag() - c2.real() * cv.imag()) / det;
                double y = (c1.real() * cv.imag() - cv.real() * c1.imag()) / det;
                S r = v - traits::from_int(std::llround(x)) * b1 -
                      traits::from_int(std::llround(y)) * (*b2);
                if (traits::magnitude(r) > tol) {
                    next.push_back(r);
                    changed = true;
                }
            }
            if (!changed) {
                auto [r1, r2] = lagrange_reduce(b1, *b2);
                basis = {detail::canonical_sign(r1), detail::canonical_sign(r2)};
                have_basis = true;
            } else {
                vecs = std::move(next);
            }
            if (traits::magnitude(vecs[0]) < 1e-7 * scale && !have_basis) {
                cls.tag = SingularTag::NonDiscrete;
                cls.commensurability_cutoff_hit = true;
                return cls;
            }
        }
        if (!have_basis) {
            cls.tag = SingularTag::NonDiscrete;
            cls.commensurability_cutoff_hit = true;
            return cls;
        }
        auto orient = traits::to_complex(traits::conj(basis[0]) * basis[1]).imag();
        if (orient < 0) basis[1] = -basis[1];
        cls.tag = SingularTag::Elliptic;
        cls.basis = basis;
        return cls;
    }
}

/// Membership in the closed singular set described by a class.
template <class S>
bool singular_set_contains(const SingularClass<S>& cls, const S& z, double tol = 1e-9) {
    using traits = scalar_traits<S>;
    const S d = z - cls.z0;
    switch (cls.tag) {
        case SingularTag::Rational:
            return traits::magnitude(d) <= tol;
        case SingularTag::Trigonometric: {
            auto r = traits::to_complex(d * (traits::one() / *cls.omega));
            if (std::abs(r.imag()) > tol) return false;
            return std::abs(r.real() - std::round(r.real())) <= tol;
        }
        case SingularTag::Elliptic: {
            auto c1 = traits::to_complex((*cls.basis)[0]);
            auto c2 = traits::to_complex((*cls.basis)[1]);
            auto cv = traits::to_complex(d);
            double det = c1.real() * c2.imag() - c2.real() * c1.imag();
            double x = (cv.real() * c2.imag() - c2.real() * cv.imag()) / det;
            double y = (c1.real() * cv.imag() - cv.real() * c1.imag()) / det;
            return std::abs(x - std::round(x)) <= tol && std::abs(y - std::round(y)) <= tol;
        }
        default:
            return false;
    }
}

/// The maximal finite-gap family whose singular set is the given class.
/// Geometry is carried verbatim (pole step / pole lattice); the free
/// coefficients count the family's dimensions including the additive
/// constant.
template <class S>
struct FamilyTemplate {
    std::string family; // "rat" | "trig" | "dtv"
    S z0{};
    std::optional<S> step;                 // trig: pole spacing
    std::optional<std::array<S, 2>> basis; // dtv: pole lattice = half-periods
    int free_alpha_count = 0;
};

template <class S>
FamilyTemplate<S> family_template(const SingularClass<S>& cls) {
    FamilyTemplate<S> t;
    t.z0 = cls.z0;
    switch (cls.tag) {
        case SingularTag::Rational:
            t.family = "rat";
            t.free_alpha_count = 2;
            return t;
        case SingularTag::Trigonometric:
            // Pole set of a1/sin^2(az) + a2/cos^2(az) with a = pi/(2 omega)
            // is exactly omega Z: sin poles on the even multiples, cos
            // poles on the odd ones.
            t.family = "trig";
            t.step = cls.omega;
            t.free_alpha_count = 3;
            return t;
        case SingularTag::Elliptic:
            // Half-periods are the classified basis itself: the four pole
            // orbits {0, b1, b2, b1+b2} + 2L tile the singular lattice.
            t.family = "dtv";
            t.basis = cls.basis;
            t.free_alpha_count = 5;
            return t;
        default:
            throw std::domain_error(
                "family_template: a non-discrete singular set admits no finite-gap family");
    }
}

/// Builds a concrete potential from a template (floating mode: the
/// trigonometric frequency and the period lattice are transcendental in
/// the classified data).
template <class T, class S>
PotentialSpec<std::complex<T>> instantiate_template(const FamilyTemplate<S>& t,
                                                    const std::vector<std::complex<T>>& alphas) {
    using C = std::complex<T>;
    using straits = scalar_traits<S>;
    if (static_cast<int>(alphas.size()) != t.free_alpha_count) {
        throw std::invalid_argument("instantiate_template: wrong number of coefficients");
    }
    auto conv = [](const S& v) {
        auto c = straits::to_complex(v);
        return C(static_cast<T>(c.real()), static_cast<T>(c.imag()));
    };
    if (t.family == "rat") {
        RatPotential<C> r;
        r.alpha0 = alphas[0];
        r.alpha1 = alphas[1];
        r.shift = conv(t.z0);
        return r;
    }
    if (t.family == "trig") {
        TrigPotential<C> p;
        p.a = C(T(M_PI)) / (T(2) * conv(*t.step));
        p.alpha0 = alphas[0];
        p.alpha1 = alphas[1];
        p.alpha2 = alphas[2];
        p.shift = conv(t.z0);
        return p;
    }
    DtvPotential<C> d;
    d.lattice = lattice_from_periods<T>(conv((*t.basis)[0]), conv((*t.basis)[1]));
    d.alpha[0] = alphas[0];
    for (int i = 1; i <= 4; ++i) d.alpha[static_cast<std::size_t>(i)] = alphas[static_cast<std::size_t>(i)];
    d.shift = conv(t.z0);
    return d;
}

} // namespace dtv
