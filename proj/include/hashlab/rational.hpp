#pragma once

// Numeric backends for probability mass values.
//
// Every quantity in this library is computed either in exact arbitrary
// precision rational arithmetic (GMP mpq_class, the default for all bound
// checks) or in binary floating point (double, for larger sweeps).  The
// two backends share one API through scalar_traits; which one a value
// uses is visible in its type and reported as "exact"/"approximate".

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hashlab {

// Raised when an exact enumeration would exceed its size guard.
struct guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Rational = mpq_class;

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;

    static const char* mode_name() { return "exact"; }

    static Rational from_fraction(long num, long den) {
        if (den == 0) throw std::invalid_argument("fraction with zero denominator");
        Rational q(num, den);
        q.canonicalize();
        return q;
    }

    static Rational from_int(long v) { return Rational(v); }

    static double to_double(const Rational& v) { return v.get_d(); }

    // Serialized as "numerator/denominator" so files round-trip exactly.
    static std::string to_string(const Rational& v) {
        return v.get_num().get_str() + "/" + v.get_den().get_str();
    }

    static Rational parse(const std::string& text) {
        auto slash = text.find('/');
        Rational q;
        if (slash == std::string::npos) {
            auto dot = text.find('.');
            if (dot == std::string::npos) {
                if (q.set_str(text, 10) != 0)
                    throw std::invalid_argument("bad rational literal: " + text);
            } else {
                // decimal literal, e.g. "0.25" -> 25/100
                std::string digits = text.substr(0, dot) + text.substr(dot + 1);
                std::size_t frac_len = text.size() - dot - 1;
                mpz_class num;
                if (num.set_str(digits.empty() ? "0" : digits, 10) != 0)
                    throw std::invalid_argument("bad decimal literal: " + text);
                mpz_class den;
                mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
                q = Rational(num, den);
            }
        } else {
            if (q.set_str(text, 10) != 0)
                throw std::invalid_argument("bad rational literal: " + text);
            if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
        }
        q.canonicalize();
        return q;
    }
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;

    static const char* mode_name() { return "approximate"; }

    static double from_fraction(long num, long den) {
        if (den == 0) throw std::invalid_argument("fraction with zero denominator");
        return static_cast<double>(num) / static_cast<double>(den);
    }

    static double from_int(long v) { return static_cast<double>(v); }

    static double to_double(double v) { return v; }

    static std::string to_string(double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    static double parse(const std::string& text) {
        auto slash = text.find('/');
        if (slash != std::string::npos) {
            double num = std::stod(text.substr(0, slash));
            double den = std::stod(text.substr(slash + 1));
            if (den == 0) throw std::invalid_argument("zero denominator: " + text);
            return num / den;
        }
        return std::stod(text);
    }
};

template <class S>
double to_double(const S& v) {
    return scalar_traits<S>::to_double(v);
}

template <class S>
S frac(long num, long den) {
    return scalar_traits<S>::from_fraction(num, den);
}

// Integer power by repeated squaring; exponent >= 0.
template <class S>
S pow_int(S base, unsigned long e) {
    S acc = scalar_traits<S>::from_int(1);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

}  // namespace hashlab
