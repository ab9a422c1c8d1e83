#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "rmtw/errors.hpp"

namespace rmtw {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Thin value wrapper over GMP's mpq_class. Every constructor canonicalizes,
/// so equality is structural and text output is unique ("p/q", or "p" when
/// the denominator is 1).
class Rational {
public:
    Rational() = default;
    Rational(long v) : v_(v) {}  // NOLINT(google-explicit-constructor)
    Rational(int v) : v_(v) {}   // NOLINT(google-explicit-constructor)
    Rational(long num, long den) {
        if (den == 0) throw Error(ErrorKind::Parse, "zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    /// Parses "p/q" or "p" (optional sign on p).
    static Rational parse(std::string_view text) {
        std::string s(text);
        if (s.empty()) throw Error(ErrorKind::Parse, "empty rational");
        auto slash = s.find('/');
        auto valid_int = [](const std::string& t, bool allow_sign) {
            if (t.empty()) return false;
            std::size_t i = 0;
            if (allow_sign && (t[0] == '-' || t[0] == '+')) i = 1;
            if (i == t.size()) return false;
            for (; i < t.size(); ++i)
                if (t[i] < '0' || t[i] > '9') return false;
            return true;
        };
        std::string num = s.substr(0, slash);
        std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
        if (!valid_int(num, true) || !valid_int(den, false))
            throw Error(ErrorKind::Parse, "malformed rational '" + s + "'");
        if (num[0] == '+') num.erase(0, 1);
        mpz_class n(num), d(den);
        if (d == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + s + "'");
        mpq_class q(n, d);
        q.canonicalize();
        return Rational(std::move(q));
    }

    /// 2^exp for any integer exponent.
    static Rational pow2(long exp) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(exp < 0 ? -exp : exp));
        return exp < 0 ? Rational(mpq_class(mpz_class(1), p)) : Rational(mpq_class(p));
    }

    const mpq_class& raw() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    int sign() const { return sgn(v_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    Rational abs() const { return Rational(mpq_class(::abs(v_))); }

    /// Largest integer <= this.
    mpz_class floor() const {
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
        return r;
    }
    mpz_class ceil() const {
        mpz_class r;
        mpz_cdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
        return r;
    }

    std::string str() const {
        if (v_.get_den() == 1) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw Error(ErrorKind::Parse, "division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class v_;
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational midpoint(const Rational& a, const Rational& b) { return (a + b) / Rational(2); }

/// Least t >= 0 with 2^t >= x, for x > 0. Returns 0 for x <= 1.
inline long ceil_log2(const Rational& x) {
    if (x <= Rational(1)) return 0;
    mpz_class c = x.ceil();
    // c >= 2; 2^t >= x iff 2^t >= ceil(x)
    long t = static_cast<long>(mpz_sizeinbase(c.get_mpz_t(), 2));
    if (mpz_popcount(c.get_mpz_t()) == 1) --t;
    return t;
}

/// Least k >= 0 with 2^-k <= x, for x > 0.
inline long neg_log2_ceil(const Rational& x) {
    if (x.sign() <= 0) throw Error(ErrorKind::Parse, "neg_log2_ceil of non-positive value");
    if (x >= Rational(1)) return 0;
    return ceil_log2(Rational(1) / x);
}

}  // namespace rmtw
