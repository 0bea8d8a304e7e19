#pragma once

#include <cmath>
#include <utility>

#include "dtv/scalar.hpp"

namespace dtv {

namespace detail {

// Squared length and real inner product of complex scalars, in whichever
// arithmetic the backend provides.
template <class S>
auto norm2_of(const S& v) {
    if constexpr (scalar_traits<S>::is_exact) {
        return v.norm2();
    } else {
        return std::norm(v);
    }
}

template <class S>
auto dot_of(const S& a, const S& b) {
    if constexpr (scalar_traits<S>::is_exact) {
        // Force a concrete value: gmpxx expression templates must not
        // outlive their operands.
        return mpq_class(a.re() * b.re() + a.im() * b.im());
    } else {
        return a.real() * b.real() + a.imag() * b.imag();
    }
}

inline mpz_class round_to_nearest(const mpq_class& q) {
    // floor(q + 1/2)
    mpq_class half_up = q + mpq_class(1, 2);
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), half_up.get_num().get_mpz_t(), half_up.get_den().get_mpz_t());
    return r;
}

} // namespace detail

/// Gauss/Lagrange reduction of a rank-2 lattice basis: returns an
/// equivalent basis with the shortest vector first and the second vector
/// size-reduced against it.
template <class S>
std::pair<S, S> lagrange_reduce(S b1, S b2) {
    using traits = scalar_traits<S>;
    if (detail::norm2_of(b2) < detail::norm2_of(b1)) std::swap(b1, b2);
    for (int iter = 0; iter < 64; ++iter) {
        auto n1 = detail::norm2_of(b1);
        if constexpr (traits::is_exact) {
            mpq_class mu = detail::dot_of(b2, b1) / n1;
            mpz_class k = detail::round_to_nearest(mu);
            if (k != 0) b2 = b2 - S(mpq_class(k)) * b1;
        } else {
            auto mu = detail::dot_of(b2, b1) / n1;
            long long k = std::llround(static_cast<double>(mu));
            if (k != 0) b2 = b2 - traits::from_int(static_cast<long>(k)) * b1;
        }
        if (detail::norm2_of(b2) < detail::norm2_of(b1)) {
            std::swap(b1, b2);
        } else {
            break;
        }
    }
    return {b1, b2};
}

} // namespace dtv
