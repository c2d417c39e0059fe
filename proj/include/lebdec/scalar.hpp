#pragma once

// Scalar backends for the decomposition library.
//
// Two scalar fields are supported:
//   - Rational (GMP mpq_class): every identity the construction relies on
//     holds exactly; tolerances degenerate to "equal to zero".
//   - double: IEEE binary64 with explicit relative tolerances.
//
// All templated modules take the scalar type as a parameter and consult
// scalar_traits<S> for the few operations that differ between backends.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace lebdec {

using Rational = mpq_class;

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool is_exact = true;
    static const char* name() { return "exact"; }
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational abs(const Rational& x) { return ::abs(x); }
    static double to_double(const Rational& x) { return x.get_d(); }
    static std::string to_string(const Rational& x) { return x.get_str(); }
    // Exact arithmetic: every comparison is against literal zero.
    static Rational default_tol() { return Rational(0); }
};

template <>
struct scalar_traits<double> {
    static constexpr bool is_exact = false;
    static const char* name() { return "float"; }
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double abs(double x) { return std::fabs(x); }
    static double to_double(double x) { return x; }
    static std::string to_string(double x) {
        if (x == 0.0) return "0";  // normalize -0
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return buf;
    }
    static double default_tol() { return 1e-12; }
};

namespace detail {

inline std::string trim_copy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

inline mpz_class pow10_z(unsigned long k) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, k);
    return p;
}

}  // namespace detail

// Parses "p/q" fractions, integers, and finite decimals (optional exponent,
// e.g. "2.5e-3") into an exact rational. Throws std::invalid_argument on
// anything else; the caller owns range checks such as nonnegativity.
inline Rational parse_rational(const std::string& text) {
    const std::string s = detail::trim_copy(text);
    if (s.empty()) throw std::invalid_argument("empty numeric field");

    const auto bad = [&]() {
        return std::invalid_argument("cannot parse '" + text + "' as a rational number");
    };

    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = (s[pos] == '-');
        ++pos;
    }
    const std::string body = s.substr(pos);
    if (body.empty()) throw bad();

    Rational magnitude;
    if (const auto slash = body.find('/'); slash != std::string::npos) {
        const std::string num = body.substr(0, slash);
        const std::string den = body.substr(slash + 1);
        if (!detail::all_digits(num) || !detail::all_digits(den)) throw bad();
        mpz_class n(num, 10), d(den, 10);
        if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        magnitude = Rational(n, d);
        magnitude.canonicalize();
    } else {
        // decimal form: digits[.digits][e[+-]digits], at least one mantissa digit
        std::string mantissa = body;
        long exponent = 0;
        if (const auto epos = body.find_first_of("eE"); epos != std::string::npos) {
            mantissa = body.substr(0, epos);
            std::string expstr = body.substr(epos + 1);
            bool eneg = false;
            if (!expstr.empty() && (expstr[0] == '+' || expstr[0] == '-')) {
                eneg = (expstr[0] == '-');
                expstr = expstr.substr(1);
            }
            if (!detail::all_digits(expstr) || expstr.size() > 6) throw bad();
            exponent = std::stol(expstr);
            if (eneg) exponent = -exponent;
        }
        std::string digits = mantissa;
        unsigned long frac_len = 0;
        if (const auto dot = mantissa.find('.'); dot != std::string::npos) {
            digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
            frac_len = mantissa.size() - dot - 1;
        }
        if (!detail::all_digits(digits)) throw bad();
        mpz_class n(digits, 10);
        const long net = exponent - static_cast<long>(frac_len);
        if (net >= 0) {
            magnitude = Rational(n * detail::pow10_z(static_cast<unsigned long>(net)));
        } else {
            magnitude = Rational(n, detail::pow10_z(static_cast<unsigned long>(-net)));
        }
        magnitude.canonicalize();
    }
    return negative ? Rational(-magnitude) : magnitude;
}

template <class S>
S parse_scalar(const std::string& text);

template <>
inline Rational parse_scalar<Rational>(const std::string& text) {
    return parse_rational(text);
}

template <>
inline double parse_scalar<double>(const std::string& text) {
    // Accept the same grammar as the exact backend and round once.
    const double v = parse_rational(text).get_d();
    if (!std::isfinite(v))
        throw std::invalid_argument("value '" + text + "' does not fit in a double");
    return v;
}

}  // namespace lebdec
