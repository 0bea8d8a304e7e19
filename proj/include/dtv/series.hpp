#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dtv/errors.hpp"
#include "dtv/scalar.hpp"

namespace dtv {

/// Truncated Laurent series at a base point: coefficients for degrees
/// min_degree()..trunc_order() of the local coordinate t = z - base_point.
/// Degrees below min_degree() are known to be zero; degrees above
/// trunc_order() are unknown.  Nonzero series keep a nonzero leading
/// coefficient (zero tests are exact in exact mode and relative to the
/// largest coefficient magnitude in floating mode).
template <class S>
class LaurentSeries {
    using traits = scalar_traits<S>;

public:
    LaurentSeries(S base_point, int min_degree, std::vector<S> coeffs)
        : base_(std::move(base_point)), min_(min_degree), coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) {
            throw std::invalid_argument("LaurentSeries: empty coefficient list");
        }
        normalize();
    }

    static LaurentSeries zero(S base_point, int trunc_order) {
        return LaurentSeries(std::move(base_point), trunc_order, {traits::zero()});
    }

    static LaurentSeries constant(S base_point, S value, int trunc_order) {
        if (trunc_order < 0) return zero(std::move(base_point), trunc_order);
        std::vector<S> c(static_cast<std::size_t>(trunc_order) + 1, traits::zero());
        c[0] = std::move(value);
        return LaurentSeries(std::move(base_point), 0, std::move(c));
    }

    static LaurentSeries monomial(S base_point, S value, int degree, int trunc_order) {
        if (trunc_order < degree) {
            throw std::invalid_argument("LaurentSeries::monomial: truncation below degree");
        }
        std::vector<S> c(static_cast<std::size_t>(trunc_order - degree) + 1, traits::zero());
        c[0] = std::move(value);
        return LaurentSeries(std::move(base_point), degree, std::move(c));
    }

    const S& base_point() const { return base_; }
    int min_degree() const { return min_; }
    int trunc_order() const { return min_ + static_cast<int>(coeffs_.size()) - 1; }
    std::span<const S> coeffs() const { return coeffs_; }

    bool is_zero() const {
        return coeffs_.size() == 1 && traits::is_zero(coeffs_[0]);
    }

    /// Degree of the first known nonzero coefficient; trunc_order()+1 for
    /// the zero series (its unknown tail starts there).
    int valuation() const { return is_zero() ? trunc_order() + 1 : min_; }

    /// Coefficient at a degree.  Zero below min_degree(); degrees past the
    /// truncation are unknown and refuse with the order that would serve.
    const S& coeff(int degree) const {
        static const S kZero = traits::zero();
        if (degree < min_) return kZero;
        if (degree > trunc_order()) {
            throw truncation_error("coefficient beyond truncation order", degree);
        }
        return coeffs_[static_cast<std::size_t>(degree - min_)];
    }

    double max_coeff_magnitude() const {
        double m = 0;
        for (const auto& c : coeffs_) m = std::max(m, traits::magnitude(c));
        return m;
    }

    LaurentSeries truncated(int new_trunc) const {
        if (new_trunc >= trunc_order()) return *this;
        if (new_trunc < min_) return zero(base_, new_trunc);
        std::vector<S> c(coeffs_.begin(),
                         coeffs_.begin() + (new_trunc - min_ + 1));
        return LaurentSeries(base_, min_, std::move(c));
    }

    /// Multiplies by t^k (pure degree shift).
    LaurentSeries shifted(int k) const {
        LaurentSeries r = *this;
        r.min_ += k;
        return r;
    }

    /// Same coefficients relabelled to a new expansion point.
    LaurentSeries with_base_point(S b) const {
        LaurentSeries r = *this;
        r.base_ = std::move(b);
        return r;
    }

private:
    LaurentSeries() = default;

    // Strips leading coefficients that are literally zero.  Tolerance-based
    // zero decisions stay in the verdict layers: discarding "relatively
    // small" stored coefficients would corrupt series whose coefficients
    // grow with the degree (convergence radius below one).
    void normalize() {
        std::size_t drop = 0;
        while (drop + 1 < coeffs_.size() && traits::is_zero(coeffs_[drop])) ++drop;
        if (drop > 0) {
            coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<long>(drop));
            min_ += static_cast<int>(drop);
        }
    }

    S base_;
    int min_ = 0;
    std::vector<S> coeffs_;
};

namespace detail {

template <class S>
void require_same_base(const LaurentSeries<S>& a, const LaurentSeries<S>& b) {
    using traits = scalar_traits<S>;
    const S d = a.base_point() - b.base_point();
    bool same;
    if constexpr (traits::is_exact) {
        same = traits::is_zero(d);
    } else {
        double scale = std::max(traits::magnitude(a.base_point()),
                                traits::magnitude(b.base_point()));
        same = traits::magnitude(d) <= 1e-12 * std::max(scale, 1.0);
    }
    if (!same) {
        throw std::domain_error("series operands have mismatched base points");
    }
}

} // namespace detail

template <class S>
LaurentSeries<S> operator+(const LaurentSeries<S>& a, const LaurentSeries<S>& b) {
    using traits = scalar_traits<S>;
    detail::require_same_base(a, b);
    const int trunc = std::min(a.trunc_order(), b.trunc_order());
    const int lo = std::min(std::min(a.min_degree(), b.min_degree()), trunc);
    std::vector<S> c;
    c.reserve(static_cast<std::size_t>(trunc - lo + 1));
    for (int d = lo; d <= trunc; ++d) c.push_back(a.coeff(d) + b.coeff(d));
    if (c.empty()) c.push_back(traits::zero());
    return LaurentSeries<S>(a.base_point(), lo, std::move(c));
}

template <class S>
LaurentSeries<S> operator-(const LaurentSeries<S>& a) {
    std::vector<S> c(a.coeffs().begin(), a.coeffs().end());
    for (auto& v : c) v = -v;
    return LaurentSeries<S>(a.base_point(), a.min_degree(), std::move(c));
}

template <class S>
LaurentSeries<S> operator-(const LaurentSeries<S>& a, const LaurentSeries<S>& b) {
    return a + (-b);
}

template <class S>
LaurentSeries<S> operator*(const LaurentSeries<S>& a, const LaurentSeries<S>& b) {
    using traits = scalar_traits<S>;
    detail::require_same_base(a, b);
    const int va = a.valuation(), vb = b.valuation();
    // Unknown tails start at trunc+1; the first product degree they can
    // pollute bounds the result truncation.
    const int trunc = std::min(a.trunc_order() + vb, b.trunc_order() + va);
    const int lo = va + vb;
    if (a.is_zero() || b.is_zero() || lo > trunc) {
        return LaurentSeries<S>::zero(a.base_point(), trunc);
    }
    std::vector<S> c(static_cast<std::size_t>(trunc - lo + 1), traits::zero());
    const int ahi = std::min(a.trunc_order(), trunc - vb);
    for (int i = va; i <= ahi; ++i) {
        if (traits::is_zero(a.coeff(i))) continue;
        const int bhi = std::min(b.trunc_order(), trunc - i);
        for (int j = vb; j <= bhi; ++j) {
            c[static_cast<std::size_t>(i + j - lo)] += a.coeff(i) * b.coeff(j);
        }
    }
    return LaurentSeries<S>(a.base_point(), lo, std::move(c));
}

template <class S>
LaurentSeries<S> operator*(const S& s, const LaurentSeries<S>& a) {
    std::vector<S> c(a.coeffs().begin(), a.coeffs().end());
    for (auto& v : c) v = s * v;
    return LaurentSeries<S>(a.base_point(), a.min_degree(), std::move(c));
}

template <class S>
LaurentSeries<S> operator*(const LaurentSeries<S>& a, const S& s) {
    return s * a;
}

/// Power-series long division A/B up to the shared truncation budget.
template <class S>
LaurentSeries<S> operator/(const LaurentSeries<S>& a, const LaurentSeries<S>& b) {
    using traits = scalar_traits<S>;
    detail::require_same_base(a, b);
    if (b.is_zero()) {
        throw std::domain_error("division by zero series");
    }
    const int vb = b.valuation();
    if (a.is_zero()) {
        return LaurentSeries<S>::zero(a.base_point(), a.trunc_order() - vb);
    }
    const int va = a.valuation();
    const int n = std::min(a.trunc_order() - va, b.trunc_order() - vb);
    if (n < 0) {
        throw truncation_error("division: no overlapping coefficient range",
                               std::max(va, vb));
    }
    const S& b0 = b.coeff(vb);
    std::vector<S> q(static_cast<std::size_t>(n) + 1, traits::zero());
    for (int k = 0; k <= n; ++k) {
        S acc = a.coeff(va + k);
        for (int j = 1; j <= k; ++j) {
            acc -= b.coeff(vb + j) * q[static_cast<std::size_t>(k - j)];
        }
        q[static_cast<std::size_t>(k)] = acc / b0;
    }
    return LaurentSeries<S>(a.base_point(), va - vb, std::move(q));
}

template <class S>
LaurentSeries<S> derivative(const LaurentSeries<S>& a) {
    using traits = scalar_traits<S>;
    const int trunc = a.trunc_order() - 1;
    if (a.is_zero()) return LaurentSeries<S>::zero(a.base_point(), trunc);
    std::vector<S> c;
    c.reserve(a.coeffs().size());
    for (int d = a.min_degree(); d <= a.trunc_order(); ++d) {
        c.push_back(traits::from_int(d) * a.coeff(d));
    }
    return LaurentSeries<S>(a.base_point(), a.min_degree() - 1, std::move(c));
}

/// Term-wise antiderivative with zero constant term.  Refuses a t^{-1}
/// term (it would need a logarithm).
template <class S>
LaurentSeries<S> antiderivative(const LaurentSeries<S>& a) {
    using traits = scalar_traits<S>;
    const int trunc = a.trunc_order() + 1;
    if (a.is_zero()) return LaurentSeries<S>::zero(a.base_point(), trunc);
    if (a.min_degree() <= -1 && a.trunc_order() >= -1 &&
        !traits::is_zero(a.coeff(-1))) {
        throw std::domain_error("antiderivative of a t^{-1} term is not a Laurent series");
    }
    const int lo = std::min(a.min_degree() + 1, 0);
    std::vector<S> c(static_cast<std::size_t>(trunc - lo + 1), traits::zero());
    for (int d = a.min_degree(); d <= a.trunc_order(); ++d) {
        if (d == -1) continue;
        c[static_cast<std::size_t>(d + 1 - lo)] =
            a.coeff(d) / traits::from_int(d + 1);
    }
    return LaurentSeries<S>(a.base_point(), lo, std::move(c));
}

/// Evaluates the series at local coordinate t (value of z - base_point).
template <class S>
S evaluate(const LaurentSeries<S>& a, const S& t) {
    using traits = scalar_traits<S>;
    S pos = traits::zero();
    const int low = std::max(a.min_degree(), 0);
    for (int d = a.trunc_order(); d >= low; --d) {
        pos = pos * t + a.coeff(d);
    }
    for (int i = 0; i < low; ++i) pos = pos * t;
    if (a.min_degree() >= 0) return pos;
    const S inv = traits::one() / t;
    S neg = traits::zero();
    for (int d = a.min_degree(); d <= std::min(a.trunc_order(), -1); ++d) {
        neg = (neg + a.coeff(d)) * inv;
    }
    return pos + neg;
}

/// sqrt(1 + h) for a series h with positive valuation; the branch with
/// constant term 1.
template <class S>
LaurentSeries<S> sqrt_one_plus(const LaurentSeries<S>& h) {
    using traits = scalar_traits<S>;
    if (!h.is_zero() && h.valuation() < 1) {
        throw std::invalid_argument("sqrt_one_plus: series must have positive valuation");
    }
    const int trunc = h.trunc_order();
    if (trunc < 0) {
        throw truncation_error("sqrt_one_plus: no coefficient budget", 0);
    }
    const S half = traits::from_ratio(1, 2);
    std::vector<S> s(static_cast<std::size_t>(trunc) + 1, traits::zero());
    s[0] = traits::one();
    for (int n = 1; n <= trunc; ++n) {
        S acc = h.coeff(n);
        for (int j = 1; j < n; ++j) {
            acc -= s[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(n - j)];
        }
        s[static_cast<std::size_t>(n)] = half * acc;
    }
    return LaurentSeries<S>(h.base_point(), 0, std::move(s));
}

/// Largest coefficient magnitude of A - B over the degrees both know.
template <class S>
double max_coeff_difference(const LaurentSeries<S>& a, const LaurentSeries<S>& b) {
    using traits = scalar_traits<S>;
    double m = 0;
    const int hi = std::min(a.trunc_order(), b.trunc_order());
    const int lo = std::min(std::min(a.min_degree(), b.min_degree()), hi);
    for (int d = lo; d <= hi; ++d) {
        m = std::max(m, traits::magnitude(a.coeff(d) - b.coeff(d)));
    }
    return m;
}

} // namespace dtv
