#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace dtv {

/// Element of Q(i): a complex number with exact rational real and
/// imaginary parts.  This is the scalar type of the exact backend;
/// the floating backend uses std::complex<double> (or long double).
class ExactScalar {
public:
    ExactScalar() : re_(0), im_(0) {}
    ExactScalar(long n) : re_(n), im_(0) {}
    ExactScalar(const mpq_class& re) : re_(re), im_(0) { re_.canonicalize(); }
    ExactScalar(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    ExactScalar conj() const { return ExactScalar(re_, -im_); }

    /// Squared modulus, exact.
    mpq_class norm2() const { return re_ * re_ + im_ * im_; }

    ExactScalar& operator+=(const ExactScalar& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    ExactScalar& operator-=(const ExactScalar& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    ExactScalar& operator*=(const ExactScalar& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    ExactScalar& operator/=(const ExactScalar& o) {
        mpq_class n2 = o.norm2();
        if (n2 == 0) {
            throw std::domain_error("ExactScalar: division by zero");
        }
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / n2;
        mpq_class i = (im_ * o.re_ - re_ * o.im_) / n2;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
    friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
    friend ExactScalar operator*(ExactScalar a, const ExactScalar& b) { return a *= b; }
    friend ExactScalar operator/(ExactScalar a, const ExactScalar& b) { return a /= b; }
    friend ExactScalar operator-(const ExactScalar& a) { return ExactScalar(-a.re_, -a.im_); }
    friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return !(a == b); }

private:
    mpq_class re_, im_;
};

namespace detail {

/// Shortest decimal string that round-trips the value.
template <class T>
std::string format_fp(T v) {
    if constexpr (std::is_same_v<T, long double>) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.21Lg", v);
        return buf;
    } else {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }
}

/// Exact rational value of a decimal literal like "12.34e-5".
inline mpq_class decimal_to_mpq(std::string_view s) {
    std::string digits;
    long frac_digits = 0;
    long exp10 = 0;
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = s[i] == '-';
        ++i;
    }
    bool any = false;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
        digits += s[i];
        any = true;
    }
    if (i < s.size() && s[i] == '.') {
        ++i;
        for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
            digits += s[i];
            ++frac_digits;
            any = true;
        }
    }
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            eneg = s[i] == '-';
            ++i;
        }
        if (i == s.size()) throw std::invalid_argument("bad exponent in number: " + std::string(s));
        long e = 0;
        for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) e = e * 10 + (s[i] - '0');
        exp10 = eneg ? -e : e;
    }
    if (!any || i != s.size()) {
        throw std::invalid_argument("cannot parse number: " + std::string(s));
    }
    if (digits.empty()) digits = "0";
    mpz_class num(digits, 10);
    mpq_class q(num);
    long shift = exp10 - frac_digits;
    if (shift > 0) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10u, static_cast<unsigned long>(shift));
        q *= mpq_class(p);
    } else if (shift < 0) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10u, static_cast<unsigned long>(-shift));
        q /= mpq_class(p);
    }
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
}

/// Parses "p/q" or a decimal literal into an exact rational.
inline mpq_class parse_mpq(std::string_view s) {
    auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        mpq_class q;
        if (q.set_str(std::string(s), 10) != 0) {
            throw std::invalid_argument("cannot parse rational: " + std::string(s));
        }
        if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + std::string(s));
        q.canonicalize();
        return q;
    }
    return decimal_to_mpq(s);
}

inline std::string format_mpq(const mpq_class& q) { return q.get_str(); }

} // namespace detail

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<ExactScalar> {
    static constexpr bool is_exact = true;
    using real_type = mpq_class;

    static ExactScalar zero() { return ExactScalar(); }
    static ExactScalar one() { return ExactScalar(1); }
    static ExactScalar from_int(long n) { return ExactScalar(n); }
    static ExactScalar from_ratio(long num, long den) { return ExactScalar(mpq_class(num, den)); }
    static ExactScalar from_real_imag(double re, double im) {
        return ExactScalar(mpq_class(re), mpq_class(im));
    }
    static bool is_zero(const ExactScalar& v) { return v.is_zero(); }
    static ExactScalar conj(const ExactScalar& v) { return v.conj(); }
    static double magnitude(const ExactScalar& v) {
        return std::abs(to_complex(v));
    }
    static std::complex<double> to_complex(const ExactScalar& v) {
        return {v.re().get_d(), v.im().get_d()};
    }
};

template <class T>
struct scalar_traits<std::complex<T>> {
    static constexpr bool is_exact = false;
    using real_type = T;

    static std::complex<T> zero() { return {}; }
    static std::complex<T> one() { return {T(1), T(0)}; }
    static std::complex<T> from_int(long n) { return {static_cast<T>(n), T(0)}; }
    static std::complex<T> from_ratio(long num, long den) {
        return {static_cast<T>(num) / static_cast<T>(den), T(0)};
    }
    static std::complex<T> from_real_imag(double re, double im) {
        return {static_cast<T>(re), static_cast<T>(im)};
    }
    static bool is_zero(const std::complex<T>& v) { return v == std::complex<T>{}; }
    static std::complex<T> conj(const std::complex<T>& v) { return std::conj(v); }
    static double magnitude(const std::complex<T>& v) {
        return static_cast<double>(std::abs(v));
    }
    static std::complex<double> to_complex(const std::complex<T>& v) {
        return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }
};

/// Default relative tolerance for floating-mode zero tests.
inline constexpr double kDefaultEpsilon = 1e-9;

namespace detail {

template <class S>
S parse_scalar_part(std::string_view s) {
    using traits = scalar_traits<S>;
    if constexpr (traits::is_exact) {
        return S(parse_mpq(s));
    } else {
        // Accept "p/q" in floating mode too.
        auto slash = s.find('/');
        if (slash != std::string_view::npos) {
            mpq_class q = parse_mpq(s);
            return traits::from_real_imag(q.get_d(), 0.0);
        }
        std::string tmp(s);
        char* end = nullptr;
        errno = 0;
        double v = std::strtod(tmp.c_str(), &end);
        if (end != tmp.c_str() + tmp.size() || tmp.empty()) {
            throw std::invalid_argument("cannot parse number: " + tmp);
        }
        return traits::from_real_imag(v, 0.0);
    }
}

} // namespace detail

/// Parses a complex scalar literal.  Grammar: a real part, an imaginary
/// part marked by a trailing 'i', or both joined by '+'/'-'.  Numbers may
/// be rationals "p/q" or decimal literals; examples: "3/4", "-1/3i",
/// "1+2i", "2.5e-3", "i", "-i".
template <class S>
S parse_scalar(std::string_view s) {
    using traits = scalar_traits<S>;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) throw std::invalid_argument("empty scalar literal");

    // Split at the last '+'/'-' that is neither leading nor an exponent sign.
    std::size_t split = std::string_view::npos;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
        }
    }

    auto parse_imag = [&](std::string_view part) -> S {
        part.remove_suffix(1); // trailing 'i'
        if (part.empty() || part == "+") return traits::from_int(1);
        if (part == "-") return traits::from_int(-1);
        return detail::parse_scalar_part<S>(part);
    };

    if (!s.empty() && s.back() == 'i') {
        if (split == std::string_view::npos) {
            return parse_imag(s) * traits::from_real_imag(0.0, 1.0);
        }
        S re = detail::parse_scalar_part<S>(s.substr(0, split));
        S im = parse_imag(s.substr(split));
        return re + im * traits::from_real_imag(0.0, 1.0);
    }
    if (split != std::string_view::npos) {
        throw std::invalid_argument("malformed complex literal: " + std::string(s));
    }
    return detail::parse_scalar_part<S>(s);
}

/// Inverse of parse_scalar: rationals as "p/q", floats as shortest
/// round-tripping decimals, imaginary parts with a trailing 'i'.
template <class S>
std::string format_scalar(const S& v) {
    using traits = scalar_traits<S>;
    if constexpr (traits::is_exact) {
        std::string re = detail::format_mpq(v.re());
        std::string im = detail::format_mpq(v.im());
        if (v.im() == 0) return re;
        std::string istr = im + "i";
        if (v.re() == 0) return istr;
        return v.im() > 0 ? re + "+" + istr : re + istr;
    } else {
        using T = typename traits::real_type;
        T re = v.real(), im = v.imag();
        if (im == T(0)) return detail::format_fp(re);
        std::string istr = detail::format_fp(im) + "i";
        if (re == T(0)) return istr;
        return im > T(0) ? detail::format_fp(re) + "+" + istr : detail::format_fp(re) + istr;
    }
}

} // namespace dtv
