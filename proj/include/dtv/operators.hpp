#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "dtv/errors.hpp"
#include "dtv/potentials.hpp"
#include "dtv/series.hpp"

namespace dtv {

/// Ordinary differential operator sum_k c_k(z) D^k with truncated-series
/// coefficients sharing one base point.
template <class S>
class DiffOperator {
    using traits = scalar_traits<S>;

public:
    /// coeffs[k] is the coefficient of D^k.
    DiffOperator(S base_point, std::vector<LaurentSeries<S>> coeffs)
        : base_(std::move(base_point)), coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) {
            throw std::invalid_argument("DiffOperator: empty coefficient list");
        }
        for (const auto& c : coeffs_) {
            detail::require_same_base(c, LaurentSeries<S>::zero(base_, 0));
        }
        trim();
    }

    static DiffOperator zero(S base_point, int trunc) {
        return DiffOperator(base_point, {LaurentSeries<S>::zero(base_point, trunc)});
    }

    /// The derivative operator D.
    static DiffOperator d(S base_point, int trunc) {
        std::vector<LaurentSeries<S>> c;
        c.push_back(LaurentSeries<S>::zero(base_point, trunc));
        c.push_back(LaurentSeries<S>::constant(base_point, traits::one(), trunc));
        return DiffOperator(std::move(base_point), std::move(c));
    }

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    const S& base_point() const { return base_; }
    const LaurentSeries<S>& coeff(int k) const {
        return coeffs_[static_cast<std::size_t>(k)];
    }
    const std::vector<LaurentSeries<S>>& coeffs() const { return coeffs_; }

    bool is_zero() const {
        for (const auto& c : coeffs_) {
            if (!c.is_zero()) return false;
        }
        return true;
    }

    /// Leading coefficient is the constant one.
    bool is_monic(double eps = kDefaultEpsilon) const {
        const auto& top = coeffs_.back();
        auto dev = top - LaurentSeries<S>::constant(base_, traits::one(), top.trunc_order());
        if constexpr (traits::is_exact) {
            return dev.is_zero();
        } else {
            return dev.max_coeff_magnitude() <= eps * std::max(1.0, top.max_coeff_magnitude());
        }
    }

    double max_coeff_magnitude() const {
        double m = 0;
        for (const auto& c : coeffs_) m = std::max(m, c.max_coeff_magnitude());
        return m;
    }

private:
    void trim() {
        while (coeffs_.size() > 1 && coeffs_.back().is_zero()) coeffs_.pop_back();
    }

    S base_;
    std::vector<LaurentSeries<S>> coeffs_;
};

namespace detail {

inline long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace detail

template <class S>
DiffOperator<S> operator+(const DiffOperator<S>& a, const DiffOperator<S>& b) {
    std::vector<LaurentSeries<S>> c;
    const int n = std::max(a.order(), b.order());
    for (int k = 0; k <= n; ++k) {
        if (k <= a.order() && k <= b.order()) {
            c.push_back(a.coeff(k) + b.coeff(k));
        } else if (k <= a.order()) {
            c.push_back(a.coeff(k));
        } else {
            c.push_back(b.coeff(k));
        }
    }
    return DiffOperator<S>(a.base_point(), std::move(c));
}

template <class S>
DiffOperator<S> operator-(const DiffOperator<S>& a) {
    std::vector<LaurentSeries<S>> c;
    for (int k = 0; k <= a.order(); ++k) c.push_back(-a.coeff(k));
    return DiffOperator<S>(a.base_point(), std::move(c));
}

template <class S>
DiffOperator<S> operator-(const DiffOperator<S>& a, const DiffOperator<S>& b) {
    return a + (-b);
}

template <class S>
DiffOperator<S> operator*(const S& s, const DiffOperator<S>& a) {
    std::vector<LaurentSeries<S>> c;
    for (int k = 0; k <= a.order(); ++k) c.push_back(s * a.coeff(k));
    return DiffOperator<S>(a.base_point(), std::move(c));
}

/// Operator composition by the generalized Leibniz rule:
/// a D^k (b D^j) = sum_i C(k,i) a b^(i) D^{k+j-i}.
template <class S>
DiffOperator<S> op_compose(const DiffOperator<S>& a, const DiffOperator<S>& b) {
    using traits = scalar_traits<S>;
    const int n = a.order() + b.order();
    std::vector<std::optional<LaurentSeries<S>>> acc(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= b.order(); ++j) {
        if (b.coeff(j).is_zero()) continue;
        // Successive derivatives of b_j, as far as needed.
        LaurentSeries<S> bder = b.coeff(j);
        for (int i = 0; i <= a.order(); ++i) {
            if (i > 0) bder = derivative(bder);
            for (int k = i; k <= a.order(); ++k) {
                if (a.coeff(k).is_zero()) continue;
                auto term = traits::from_int(detail::binomial(k, i)) *
                            (a.coeff(k) * bder);
                auto& slot = acc[static_cast<std::size_t>(k + j - i)];
                slot = slot ? *slot + term : term;
            }
        }
    }
    std::vector<LaurentSeries<S>> c;
    int fallback = std::min(a.coeff(0).trunc_order(), b.coeff(0).trunc_order());
    for (int k = 0; k <= n; ++k) {
        auto& slot = acc[static_cast<std::size_t>(k)];
        c.push_back(slot ? *slot : LaurentSeries<S>::zero(a.base_point(), fallback));
    }
    return DiffOperator<S>(a.base_point(), std::move(c));
}

template <class S>
DiffOperator<S> op_commutator(const DiffOperator<S>& a, const DiffOperator<S>& b) {
    return op_compose(a, b) - op_compose(b, a);
}

/// Formal transpose: (c D^k)^t = (-D)^k c.
template <class S>
DiffOperator<S> op_transpose(const DiffOperator<S>& a) {
    using traits = scalar_traits<S>;
    const int n = a.order();
    std::vector<std::optional<LaurentSeries<S>>> acc(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        if (a.coeff(j).is_zero()) continue;
        LaurentSeries<S> der = a.coeff(j);
        for (int i = 0; i <= j; ++i) {
            if (i > 0) der = derivative(der);
            long sign = (j % 2 ? -1 : 1);
            auto term = traits::from_int(sign * detail::binomial(j, i)) * der;
            auto& slot = acc[static_cast<std::size_t>(j - i)];
            slot = slot ? *slot + term : term;
        }
    }
    std::vector<LaurentSeries<S>> c;
    int fallback = a.coeff(0).trunc_order() - n;
    for (int k = 0; k <= n; ++k) {
        auto& slot = acc[static_cast<std::size_t>(k)];
        c.push_back(slot ? *slot : LaurentSeries<S>::zero(a.base_point(), fallback));
    }
    return DiffOperator<S>(a.base_point(), std::move(c));
}

/// L = -D^2 + u from an explicit local expansion of u (which must be
/// regular at its base point).
template <class S>
DiffOperator<S> schrodinger_from_series(const LaurentSeries<S>& u) {
    using traits = scalar_traits<S>;
    if (u.min_degree() < 0 && !u.is_zero()) {
        throw pole_error("schrodinger_from_series: potential is singular at the base point");
    }
    std::vector<LaurentSeries<S>> c;
    c.push_back(u);
    c.push_back(LaurentSeries<S>::zero(u.base_point(), u.trunc_order()));
    c.push_back(LaurentSeries<S>::constant(u.base_point(), -traits::one(), u.trunc_order()));
    return DiffOperator<S>(u.base_point(), std::move(c));
}

/// L = -D^2 + u with u expanded at the regular point z*.
template <class S>
DiffOperator<S> schrodinger_from(const PotentialSpec<S>& spec, const S& zstar, int order) {
    return schrodinger_from_series(potential_taylor_at(spec, zstar, order));
}

// ---------------------------------------------------------------------------
// Commuting-operator search

template <class S>
struct CommutingSearch {
    std::optional<DiffOperator<S>> op;
    int minimal_order = -1; // valid when op is set
    int searched_up_to = 0;
};

namespace detail {

/// Solves the (generally overdetermined) linear system rows * x = rhs by
/// Gaussian elimination with free variables pinned to zero.  Returns
/// nothing when the system is inconsistent at the given tolerance.
template <class S>
std::optional<std::vector<S>> solve_linear(std::vector<std::vector<S>> m,
                                           std::vector<S> rhs, double tol_scale,
                                           double eps) {
    using traits = scalar_traits<S>;
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t col = 0; col < cols && r < rows; ++col) {
        std::size_t best = r;
        double best_mag = traits::magnitude(m[r][col]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            double mag = traits::magnitude(m[i][col]);
            if (mag > best_mag) {
                best = i;
                best_mag = mag;
            }
        }
        bool nonzero;
        if constexpr (traits::is_exact) {
            nonzero = !traits::is_zero(m[best][col]);
        } else {
            nonzero = best_mag > eps * std::max(tol_scale, 1e-300);
        }
        if (!nonzero) continue;
        std::swap(m[best], m[r]);
        std::swap(rhs[best], rhs[r]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || traits::is_zero(m[i][col])) continue;
            S f = m[i][col] / m[r][col];
            for (std::size_t jj = col; jj < cols; ++jj) m[i][jj] -= f * m[r][jj];
            rhs[i] -= f * rhs[r];
        }
        pivot_col.push_back(col);
        ++r;
    }
    // Rows below the pivot block must have vanishing right-hand sides.
    for (std::size_t i = r; i < rows; ++i) {
        if constexpr (traits::is_exact) {
            if (!traits::is_zero(rhs[i])) return std::nullopt;
        } else {
            if (traits::magnitude(rhs[i]) > eps * std::max(tol_scale, 1e-300)) {
                return std::nullopt;
            }
        }
    }
    std::vector<S> x(cols, traits::zero());
    for (std::size_t i = 0; i < r; ++i) {
        x[pivot_col[i]] = rhs[i] / m[i][pivot_col[i]];
    }
    return x;
}

/// Integrates the triangular hierarchy of commutator-coefficient
/// equations for candidate order N with the given integration constants,
/// returning the residual zero-order coefficient series of [L, A].
template <class S>
std::vector<LaurentSeries<S>> commuting_alphas(const std::vector<LaurentSeries<S>>& du,
                                               int N, const std::vector<S>& kappa) {
    using traits = scalar_traits<S>;
    const S base = du[0].base_point();
    const int trunc = du[0].trunc_order();
    const S half = traits::from_ratio(1, 2);
    // alpha[j] is the coefficient of D^j; alpha[N] = 1, alpha[N-1] = 0.
    std::vector<LaurentSeries<S>> alpha(
        static_cast<std::size_t>(N) + 1, LaurentSeries<S>::zero(base, trunc));
    alpha[static_cast<std::size_t>(N)] =
        LaurentSeries<S>::constant(base, traits::one(), trunc);
    for (int k = N - 1; k >= 1; --k) {
        // c_k = -alpha_k'' - 2 alpha_{k-1}' - sum_{j>k} C(j,k) alpha_j u^{(j-k)} = 0
        auto rhs = -derivative(derivative(alpha[static_cast<std::size_t>(k)]));
        for (int j = k + 1; j <= N; ++j) {
            rhs = rhs - traits::from_int(binomial(j, k)) *
                            (alpha[static_cast<std::size_t>(j)] *
                             du[static_cast<std::size_t>(j - k)]);
        }
        auto integrated = antiderivative(half * rhs);
        alpha[static_cast<std::size_t>(k - 1)] =
            integrated + LaurentSeries<S>::constant(base, kappa[static_cast<std::size_t>(k - 1)],
                                                    integrated.trunc_order());
    }
    return alpha;
}

template <class S>
LaurentSeries<S> commuting_residual(const std::vector<LaurentSeries<S>>& du, int N,
                                    const std::vector<LaurentSeries<S>>& alpha) {
    // c_0 = -alpha_0'' - sum_{j>=1} alpha_j u^{(j)}
    auto res = -derivative(derivative(alpha[0]));
    for (int j = 1; j <= N; ++j) {
        res = res - alpha[static_cast<std::size_t>(j)] * du[static_cast<std::size_t>(j)];
    }
    return res;
}

/// Conservative estimate of the convergence radius 1/limsup |c_d|^{1/d}.
template <class S>
double estimate_radius(const LaurentSeries<S>& u) {
    double r = 1e300;
    for (int d = std::max(4, u.min_degree()); d <= u.trunc_order(); ++d) {
        double m = scalar_traits<S>::magnitude(u.coeff(d));
        if (m > 1e-300 && d > 0) r = std::min(r, std::pow(m, -1.0 / d));
    }
    return r;
}

/// s(rho t): coefficient at degree d picks up rho^d.
template <class S>
LaurentSeries<S> scale_variable(const LaurentSeries<S>& s, const S& rho) {
    using traits = scalar_traits<S>;
    std::vector<S> c;
    c.reserve(s.coeffs().size());
    S p = traits::one();
    if (s.min_degree() >= 0) {
        for (int i = 0; i < s.min_degree(); ++i) p = p * rho;
    } else {
        S inv = traits::one() / rho;
        for (int i = 0; i < -s.min_degree(); ++i) p = p * inv;
    }
    for (int d = s.min_degree(); d <= s.trunc_order(); ++d) {
        c.push_back(s.coeff(d) * p);
        p = p * rho;
    }
    return LaurentSeries<S>(s.base_point(), s.min_degree(), std::move(c));
}

} // namespace detail

namespace detail {

// The commutation thresholds are pinned at 1e-8 (relative to the
// composition scale), independent of the series zero tolerance.
template <class S>
CommutingSearch<S> find_commuting_impl(const DiffOperator<S>& L, int max_order,
                                       double /*eps*/) {
    using traits = scalar_traits<S>;
    const auto& u = L.coeff(0);
    const int cert_depth = 2 * max_order + 8;
    const int need = cert_depth + max_order + 4;
    if (u.trunc_order() < need) {
        throw truncation_error("find_commuting: potential expansion too short to certify",
                               need);
    }

    // Derivatives of u through the highest candidate order.
    std::vector<LaurentSeries<S>> du = {u};
    for (int r = 1; r <= max_order; ++r) du.push_back(derivative(du.back()));

    CommutingSearch<S> result;
    result.searched_up_to = max_order;
    for (int N = 1; N <= max_order; N += 2) {
        const int nk = N - 1; // integration constants for alpha_{N-2}..alpha_0
        std::vector<S> kappa(static_cast<std::size_t>(std::max(nk, 0)), traits::zero());
        auto alpha0 = detail::commuting_alphas(du, N, kappa);
        auto r0 = detail::commuting_residual(du, N, alpha0);
        std::vector<LaurentSeries<S>> cols;
        for (int j = 0; j < nk; ++j) {
            auto k2 = kappa;
            k2[static_cast<std::size_t>(j)] = traits::one();
            auto aj = detail::commuting_alphas(du, N, k2);
            cols.push_back(detail::commuting_residual(du, N, aj) - r0);
        }
        const int lo = 0;
        int hi = r0.trunc_order();
        for (const auto& cseries : cols) hi = std::min(hi, cseries.trunc_order());
        std::vector<std::vector<S>> m;
        std::vector<S> rhs;
        double scale = r0.max_coeff_magnitude();
        for (const auto& cseries : cols) scale = std::max(scale, cseries.max_coeff_magnitude());
        for (int d = lo; d <= hi; ++d) {
            std::vector<S> row;
            for (const auto& cseries : cols) row.push_back(cseries.coeff(d));
            m.push_back(std::move(row));
            rhs.push_back(-r0.coeff(d));
        }
        auto sol = detail::solve_linear(std::move(m), std::move(rhs), scale, 1e-8);
        if (!sol) continue;

        auto alpha = detail::commuting_alphas(du, N, *sol);
        const int atrunc = alpha[0].trunc_order();
        std::vector<LaurentSeries<S>> coeffs;
        for (int k = 0; k <= N - 2; ++k) coeffs.push_back(alpha[static_cast<std::size_t>(k)].truncated(atrunc));
        if (N >= 1) coeffs.push_back(LaurentSeries<S>::zero(u.base_point(), atrunc));
        coeffs.push_back(LaurentSeries<S>::constant(u.base_point(), traits::one(), atrunc));
        DiffOperator<S> a(u.base_point(), std::move(coeffs));
        // Anti-self-adjoint normalization.
        a = traits::from_ratio(1, 2) * (a - op_transpose(a));

        // Certify: every commutator coefficient vanishes through the
        // certification depth.
        auto la = op_compose(L, a), al = op_compose(a, L);
        auto comm = la - al;
        double cscale = std::max(la.max_coeff_magnitude(), al.max_coeff_magnitude());
        bool ok = true;
        for (int k = 0; k <= comm.order() && ok; ++k) {
            const auto& cs = comm.coeff(k);
            if (cs.trunc_order() < cert_depth - 2 * N) {
                throw truncation_error("find_commuting: cannot certify at this truncation",
                                       need + (cert_depth - 2 * N - cs.trunc_order()));
            }
            if constexpr (traits::is_exact) {
                ok = cs.is_zero();
            } else {
                ok = cs.max_coeff_magnitude() <= 1e-8 * std::max(cscale, 1.0);
            }
        }
        if (!ok) continue;
        result.op = std::move(a);
        result.minimal_order = N;
        return result;
    }
    return result;
}

} // namespace detail

/// Searches for the lowest odd order 1, 3, ..., max_order at which a monic
/// operator with no sub-leading term commutes with L = -D^2 + u.  Each
/// coefficient equation of [L, A] = 0 integrates to a series with a free
/// constant; the leftover scalar constraints form a linear system.  A
/// found operator is normalized to its formally anti-self-adjoint part
/// (which pins the additive polynomial-in-L freedom) and certified by
/// recomputing the commutator through the certification depth.
///
/// In floating mode the search runs in the rescaled variable tau = t/rho
/// with rho the estimated convergence radius of u, so the coefficient
/// magnitudes stay balanced and the zero tolerances are meaningful at
/// every degree; the result is mapped back afterwards.
template <class S>
CommutingSearch<S> find_commuting(const DiffOperator<S>& L, int max_order,
                                  double eps = kDefaultEpsilon) {
    using traits = scalar_traits<S>;
    if (max_order < 1 || max_order % 2 == 0) {
        throw std::invalid_argument("find_commuting: max_order must be odd and positive");
    }
    if (L.order() != 2 || !L.coeff(1).is_zero()) {
        throw std::invalid_argument("find_commuting: L must have Schrodinger form -D^2 + u");
    }
    if constexpr (traits::is_exact) {
        return detail::find_commuting_impl(L, max_order, eps);
    } else {
        const auto& u = L.coeff(0);
        double r_est = detail::estimate_radius(u);
        if (!(r_est > 1e-6) || r_est >= 0.999) {
            return detail::find_commuting_impl(L, max_order, eps);
        }
        const S rho = traits::from_real_imag(r_est, 0.0);
        const S rho_inv = traits::one() / rho;
        auto u_hat = (rho * rho) * detail::scale_variable(u, rho);
        auto sub = detail::find_commuting_impl(schrodinger_from_series(u_hat), max_order, eps);
        if (!sub.op) return sub;
        const int N = sub.op->order();
        std::vector<LaurentSeries<S>> coeffs;
        S factor = traits::one();
        for (int i = 0; i < N; ++i) factor = factor * rho_inv; // rho^{-N}
        for (int k = 0; k <= N; ++k) {
            coeffs.push_back(factor * detail::scale_variable(sub.op->coeff(k), rho_inv));
            factor = factor * rho; // rho^{k-N}
        }
        CommutingSearch<S> out;
        out.op = DiffOperator<S>(L.base_point(), std::move(coeffs));
        out.minimal_order = sub.minimal_order;
        out.searched_up_to = sub.searched_up_to;
        return out;
    }
}

// ---------------------------------------------------------------------------
// Spectral curves

/// The polynomial P with A^2 = P(L); degree 2n+1, genus bound n.
template <class S>
struct SpectralCurve {
    int degree = 0;
    std::vector<S> coeffs; // ascending powers of lambda
    std::vector<std::complex<double>> roots; // floating mode only
    int genus_bound = 0;
};

namespace detail {

/// Durand-Kerner root finder for small-degree polynomials.
inline std::vector<std::complex<double>> poly_roots(std::vector<std::complex<double>> c) {
    using C = std::complex<double>;
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    if (n <= 0) return {};
    for (auto& v : c) v /= c[static_cast<std::size_t>(n)];
    std::vector<C> r(static_cast<std::size_t>(n));
    C seed(0.4, 0.9);
    C acc(1, 0);
    for (int i = 0; i < n; ++i) {
        acc *= seed;
        r[static_cast<std::size_t>(i)] = acc;
    }
    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0;
        for (int i = 0; i < n; ++i) {
            C p(0);
            for (int k = n; k >= 0; --k) p = p * r[static_cast<std::size_t>(i)] + c[static_cast<std::size_t>(k)];
            C den(1);
            for (int j = 0; j < n; ++j) {
                if (j != i) den *= r[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(j)];
            }
            C delta = p / den;
            r[static_cast<std::size_t>(i)] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-14) break;
    }
    std::sort(r.begin(), r.end(), [](const C& x, const C& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return r;
}

} // namespace detail

namespace detail {

template <class S>
SpectralCurve<S> spectral_polynomial_impl(const DiffOperator<S>& L,
                                          const DiffOperator<S>& A, double eps) {
    using traits = scalar_traits<S>;
    const int N = A.order();
    auto m = op_compose(A, A);
    const double scale = std::max(m.max_coeff_magnitude(), 1.0);
    std::vector<DiffOperator<S>> lpow;
    lpow.push_back(DiffOperator<S>(
        L.base_point(),
        {LaurentSeries<S>::constant(L.base_point(), traits::one(),
                                    L.coeff(0).trunc_order())}));
    for (int k = 1; k <= N; ++k) lpow.push_back(op_compose(L, lpow.back()));

    auto is_small = [&](const LaurentSeries<S>& s, double sc) {
        if constexpr (traits::is_exact) {
            return s.is_zero();
        } else {
            return s.max_coeff_magnitude() <= eps * std::max(sc, 1.0) * 100;
        }
    };

    std::vector<S> coeffs(static_cast<std::size_t>(N) + 1, traits::zero());
    for (int k = N; k >= 0; --k) {
        S c_k = traits::zero();
        if (2 * k <= m.order()) {
            const auto& top = m.coeff(2 * k);
            S val = top.min_degree() <= 0 && top.trunc_order() >= 0 ? top.coeff(0)
                                                                    : traits::zero();
            auto dev = top - LaurentSeries<S>::constant(m.base_point(), val, top.trunc_order());
            if (!is_small(dev, scale)) {
                throw not_commuting_error(
                    "spectral_polynomial: peel coefficient is not constant");
            }
            // L^k has leading coefficient (-1)^k at D^{2k}.
            c_k = k % 2 ? -val : val;
        }
        coeffs[static_cast<std::size_t>(k)] = c_k;
        if (!traits::is_zero(c_k)) {
            m = m - c_k * lpow[static_cast<std::size_t>(k)];
        }
    }
    for (int k = 0; k <= m.order(); ++k) {
        if (!is_small(m.coeff(k), scale)) {
            throw not_commuting_error("spectral_polynomial: nonzero remainder after peeling");
        }
    }
    SpectralCurve<S> curve;
    curve.degree = N;
    curve.coeffs = std::move(coeffs);
    curve.genus_bound = (N - 1) / 2;
    return curve;
}

} // namespace detail

/// Extracts the Burchnall-Chaundy polynomial by peeling powers of L off
/// A^2.  Every peel coefficient must be a constant series and the final
/// remainder must vanish; anything else means the pair does not commute
/// (or the truncation is too coarse).  Floating mode peels in the same
/// rescaled variable as find_commuting and converts the polynomial back.
template <class S>
SpectralCurve<S> spectral_polynomial(const DiffOperator<S>& L, const DiffOperator<S>& A,
                                     double eps = kDefaultEpsilon) {
    using traits = scalar_traits<S>;
    if (L.order() != 2) {
        throw std::invalid_argument("spectral_polynomial: L must have order 2");
    }
    const int N = A.order();
    if (N % 2 == 0) {
        throw std::invalid_argument("spectral_polynomial: A must have odd order");
    }
    SpectralCurve<S> curve;
    if constexpr (traits::is_exact) {
        curve = detail::spectral_polynomial_impl(L, A, eps);
    } else {
        const auto& u = L.coeff(0);
        double r_est = detail::estimate_radius(u);
        if (!(r_est > 1e-6) || r_est >= 0.999) {
            curve = detail::spectral_polynomial_impl(L, A, eps);
        } else {
            // L_hat = rho^2 L and A_hat = rho^N A in tau = t/rho, so
            // A_hat^2 = P_hat(L_hat) converts by p_j = p_hat_j rho^{2j-2N}.
            const S rho = traits::from_real_imag(r_est, 0.0);
            auto u_hat = (rho * rho) * detail::scale_variable(u, rho);
            auto l_hat = schrodinger_from_series(u_hat);
            std::vector<LaurentSeries<S>> coeffs;
            S factor = traits::one();
            for (int i = 0; i < N; ++i) factor = factor * rho; // rho^{N-k} at k=0
            for (int k = 0; k <= N; ++k) {
                coeffs.push_back(factor * detail::scale_variable(A.coeff(k), rho));
                factor = factor / rho;
            }
            DiffOperator<S> a_hat(A.base_point(), std::move(coeffs));
            auto hat = detail::spectral_polynomial_impl(l_hat, a_hat, eps);
            curve = hat;
            S conv = traits::one();
            for (int i = 0; i < 2 * N; ++i) conv = conv / rho; // rho^{-2N} at j=0
            for (int j = 0; j <= N; ++j) {
                curve.coeffs[static_cast<std::size_t>(j)] =
                    hat.coeffs[static_cast<std::size_t>(j)] * conv;
                conv = conv * rho * rho;
            }
        }
    }
    if constexpr (!traits::is_exact) {
        std::vector<std::complex<double>> cd;
        for (const auto& c : curve.coeffs) cd.push_back(traits::to_complex(c));
        curve.roots = detail::poly_roots(std::move(cd));
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Darboux transformations

template <class S>
struct DarbouxResult {
    LaurentSeries<S> transformed; // u - 2 (log psi0)''
    S lambda0;                    // eigenvalue of psi0, recovered from the series
};

/// u -> u - 2 (log psi0)'' for an eigenfunction psi0 of -psi'' + u psi.
template <class S>
DarbouxResult<S> darboux_transform(const LaurentSeries<S>& u, const LaurentSeries<S>& psi0,
                                   double eps = kDefaultEpsilon) {
    using traits = scalar_traits<S>;
    if (psi0.is_zero()) {
        throw std::invalid_argument("darboux_transform: psi0 is the zero series");
    }
    auto d1 = derivative(psi0);
    auto d2 = derivative(d1);
    // Recover the eigenvalue and verify -psi'' + u psi = lambda psi.
    auto num = -d2 + u * psi0;
    auto ratio = num / psi0;
    S lambda0 = ratio.min_degree() <= 0 && ratio.trunc_order() >= 0 ? ratio.coeff(0)
                                                                    : traits::zero();
    auto resid = num - lambda0 * psi0;
    double sc = std::max({num.max_coeff_magnitude(),
                          traits::magnitude(lambda0) * psi0.max_coeff_magnitude(), 1.0});
    bool ok;
    if constexpr (traits::is_exact) {
        ok = resid.is_zero();
    } else {
        ok = resid.max_coeff_magnitude() <= 100 * eps * sc;
    }
    if (!ok) {
        throw std::invalid_argument(
            "darboux_transform: psi0 is not an eigenfunction of -D^2 + u");
    }
    auto logpp = (d2 * psi0 - d1 * d1) / (psi0 * psi0);
    DarbouxResult<S> out{u - (traits::from_int(2) * logpp), lambda0};
    return out;
}

/// Convenience overload expanding a potential at one of its pole classes.
template <class S>
DarbouxResult<S> darboux_transform(const PotentialSpec<S>& spec, int pole_index,
                                   const LaurentSeries<S>& psi0,
                                   double eps = kDefaultEpsilon) {
    auto u = potential_series_at_pole(spec, pole_index, psi0.trunc_order() + 4);
    return darboux_transform(u, psi0, eps);
}

} // namespace dtv
