#pragma once

#include <cstdint>
#include <mutex>
#include <numeric>
#include <utility>
#include <vector>

#include "rmtw/errors.hpp"
#include "rmtw/rational.hpp"

namespace rmtw {

/// Cantor pairing <a, b> = (a+b)(a+b+1)/2 + b.
inline std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b) {
    return (a + b) * (a + b + 1) / 2 + b;
}

inline std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t z) {
    std::uint64_t w = 0;
    while ((w + 1) * (w + 2) / 2 <= z) ++w;
    std::uint64_t b = z - w * (w + 1) / 2;
    return {w - b, b};
}

namespace detail {

inline std::uint64_t totient(std::uint64_t n) {
    std::uint64_t r = n;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            r -= r / p;
        }
    }
    if (n > 1) r -= r / n;
    return r;
}

struct UnitRationalTable {
    std::mutex mu;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> items{{0, 1}, {1, 1}};
    std::uint64_t next_den = 2;
};

inline UnitRationalTable& unit_table() {
    static UnitRationalTable t;
    return t;
}

}  // namespace detail

/// The fixed enumeration r_0, r_1, ... of the rationals in [0,1]:
/// 0, 1, then p/d in lowest terms ordered by d = 2, 3, ... and then by p.
/// So the list starts 0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ...
inline Rational unit_rational(std::uint64_t n) {
    auto& t = detail::unit_table();
    std::lock_guard lock(t.mu);
    while (t.items.size() <= n) {
        std::uint64_t d = t.next_den++;
        for (std::uint64_t p = 1; p < d; ++p)
            if (std::gcd(p, d) == 1) t.items.emplace_back(p, d);
    }
    auto [p, d] = t.items[n];
    return Rational(static_cast<long>(p), static_cast<long>(d));
}

/// Inverse of unit_rational: the index of t in the enumeration.
inline std::uint64_t unit_rational_rank(const Rational& t) {
    if (t.sign() < 0 || t > Rational(1))
        throw Error(ErrorKind::OutOfDomain, "rank of " + t.str() + " outside [0,1]");
    if (t.is_zero()) return 0;
    if (t == Rational(1)) return 1;
    if (!t.den().fits_ulong_p())
        throw Error(ErrorKind::OutOfDomain, "rank of " + t.str() + " out of range");
    std::uint64_t p = t.num().get_ui();
    std::uint64_t q = t.den().get_ui();
    std::uint64_t idx = 2;
    for (std::uint64_t d = 2; d < q; ++d) idx += detail::totient(d);
    for (std::uint64_t k = 1; k < p; ++k)
        if (std::gcd(k, q) == 1) ++idx;
    return idx;
}

/// Canonical code of an arbitrary rational p/q (lowest terms, q > 0):
/// cantor_pair(zigzag(p), q - 1), where zigzag maps 0, -1, 1, -2, ... to
/// 0, 1, 2, 3, .... The rational 0 has code 0. Codes are unbounded, hence mpz.
inline mpz_class rational_code(const Rational& q) {
    mpz_class p = q.num();
    mpz_class zig = p >= 0 ? mpz_class(2 * p) : mpz_class(-2 * p - 1);
    mpz_class b = q.den() - 1;
    mpz_class w = zig + b;
    return w * (w + 1) / 2 + b;
}

}  // namespace rmtw
