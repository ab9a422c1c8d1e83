#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rmtw/enumeration.hpp"
#include "rmtw/errors.hpp"
#include "rmtw/interval.hpp"
#include "rmtw/rational.hpp"
#include "rmtw/stream.hpp"

namespace rmtw {

/// Two injections g0, g1 : N -> N with disjoint ranges, observed on a finite
/// set of arguments. Unobserved arguments are simply not yet enumerated.
struct SeparationInstance {
    std::map<std::uint64_t, std::uint64_t> g0;
    std::map<std::uint64_t, std::uint64_t> g1;

    enum class Side { G0, G1 };
    struct Hit {
        std::uint64_t stage;
        Side side;
    };

    bool empty() const { return g0.empty() && g1.empty(); }

    /// Throws InstanceViolation if injectivity or range-disjointness fails.
    void validate() const {
        auto injective = [](const std::map<std::uint64_t, std::uint64_t>& g, const char* name) {
            std::map<std::uint64_t, std::uint64_t> seen;
            for (const auto& [m, v] : g) {
                auto [it, fresh] = seen.emplace(v, m);
                if (!fresh)
                    throw Error(ErrorKind::InstanceViolation,
                                std::string(name) + "(" + std::to_string(it->second) + ") = " + name +
                                    "(" + std::to_string(m) + ") = " + std::to_string(v));
            }
        };
        injective(g0, "g0");
        injective(g1, "g1");
        for (const auto& [m, v] : g0)
            for (const auto& [n, w] : g1)
                if (v == w)
                    throw Error(ErrorKind::InstanceViolation,
                                "g0(" + std::to_string(m) + ") = g1(" + std::to_string(n) +
                                    ") = " + std::to_string(v));
    }

    std::set<std::uint64_t> range0() const {
        std::set<std::uint64_t> r;
        for (const auto& kv : g0) r.insert(kv.second);
        return r;
    }
    std::set<std::uint64_t> range1() const {
        std::set<std::uint64_t> r;
        for (const auto& kv : g1) r.insert(kv.second);
        return r;
    }

    /// Least s with g0(s) = e or g1(s) = e.
    std::optional<Hit> first_hit(std::uint64_t e) const {
        std::optional<Hit> best;
        for (const auto& [m, v] : g0)
            if (v == e && (!best || m < best->stage)) best = Hit{m, Side::G0};
        for (const auto& [m, v] : g1)
            if (v == e && (!best || m < best->stage)) best = Hit{m, Side::G1};
        return best;
    }
};

/// Binary tree given by a membership test on strings over {'0','1'}.
struct BinTree {
    std::function<bool(const std::string&)> member;

    bool contains(const std::string& sigma) const { return member(sigma); }

    /// Members of length d, in lexicographic order.
    std::vector<std::string> level(std::size_t d) const {
        std::vector<std::string> cur{""};
        if (!member("")) return {};
        for (std::size_t l = 0; l < d; ++l) {
            std::vector<std::string> next;
            for (const auto& s : cur)
                for (char c : {'0', '1'})
                    if (member(s + c)) next.push_back(s + c);
            cur = std::move(next);
        }
        return cur;
    }
};

/// Tree of finite approximations to separating sets: sigma survives iff for
/// every j < |sigma| and e < |sigma|, g0(j) = e forces sigma(e) = 1 and
/// g1(j) = e forces sigma(e) = 0.
inline BinTree kleene_tree(const SeparationInstance& inst) {
    inst.validate();
    return BinTree{[inst](const std::string& sigma) {
        std::uint64_t len = sigma.size();
        for (const auto& [j, e] : inst.g0)
            if (j < len && e < len && sigma[e] != '1') return false;
        for (const auto& [j, e] : inst.g1)
            if (j < len && e < len && sigma[e] != '0') return false;
        return true;
    }};
}

inline std::set<std::uint64_t> path_to_sepset(const std::string& branch) {
    std::set<std::uint64_t> x;
    for (std::size_t e = 0; e < branch.size(); ++e)
        if (branch[e] == '1') x.insert(e);
    return x;
}

inline std::string sepset_to_path(const std::set<std::uint64_t>& x, std::size_t depth) {
    std::string s(depth, '0');
    for (auto e : x)
        if (e < depth) s[e] = '1';
    return s;
}

enum class CoverClaim { CoversAllRationals, CoversAllReals, Unknown };

inline const char* to_string(CoverClaim c) {
    switch (c) {
        case CoverClaim::CoversAllRationals: return "covers-all-rationals";
        case CoverClaim::CoversAllReals: return "covers-all-reals";
        case CoverClaim::Unknown: return "unknown";
    }
    return "unknown";
}

/// Enumerated open rational intervals (a_k, b_k) with a_k < b_k.
struct CoverStream {
    Stream<Interval> intervals;
    CoverClaim claim = CoverClaim::Unknown;
};

/// (r_n - 2^-(n+c), r_n + 2^-(n+c)) around the n-th rational of [0,1].
/// Covers every rational of [0,1]; total length 2^-(c-2).
inline CoverStream specker_cover(unsigned c = 3) {
    if (c < 3) throw Error(ErrorKind::Parse, "specker shrink exponent must be >= 3");
    return CoverStream{Stream<Interval>([c](std::size_t n) -> std::optional<Interval> {
                           Rational r = unit_rational(n);
                           Rational w = Rational::pow2(-static_cast<long>(n + c));
                           return Interval::open(r - w, r + w);
                       }),
                       CoverClaim::CoversAllRationals};
}

/// Left end of the Cantor-set cylinder of sigma: sum of 2 sigma_i 3^-(i+1).
inline Rational cantor_point(const std::string& sigma) {
    Rational x(0);
    Rational w(1, 3);
    for (char c : sigma) {
        if (c == '1') x += Rational(2) * w;
        w /= Rational(3);
    }
    return x;
}

inline Rational pow3_neg(std::size_t k) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 3, k);
    return Rational(mpq_class(mpz_class(1), p));
}

/// Cover of [0,1] from a binary tree through the Cantor-set embedding.
///
/// Node sigma at depth l owns the cylinder [x, x + 3^-l], x = cantor_point(sigma).
/// Level by level up to max_depth, in lexicographic order among children of
/// live nodes, emits:
///   - for each minimal dead node, its cylinder padded by 3^-(l+1) on both
///     sides; distinct cylinders at depth l sit at least 3^-l apart, so the
///     padding never reaches a point whose every prefix is live;
///   - for each live node, the open middle third of its cylinder.
/// A point on an infinite path is therefore never covered, and a finite tree
/// yields a finite cover of [0,1].
inline CoverStream tree_to_cover(const BinTree& t, std::size_t max_depth) {
    std::vector<Interval> out;
    std::vector<std::string> live;
    if (!t.contains("")) {
        out.push_back(Interval::open(Rational(-1, 3), Rational(4, 3)));
        return CoverStream{Stream<Interval>(std::move(out)), CoverClaim::CoversAllReals};
    }
    live.push_back("");
    for (std::size_t l = 0; l <= max_depth && !live.empty(); ++l) {
        std::vector<std::string> next;
        for (const auto& sigma : live) {
            Rational x = cantor_point(sigma);
            Rational third = pow3_neg(l + 1);
            out.push_back(Interval::open(x + third, x + third + third));
            if (l == max_depth) {
                next.push_back(sigma);  // unexplored, still live
                continue;
            }
            for (char c : {'0', '1'}) {
                std::string child = sigma + c;
                if (t.contains(child)) {
                    next.push_back(child);
                } else {
                    Rational cx = cantor_point(child);
                    Rational pad = pow3_neg(l + 2);
                    out.push_back(Interval::open(cx - pad, cx + third + pad));
                }
            }
        }
        live = std::move(next);
    }
    CoverClaim claim = live.empty() ? CoverClaim::CoversAllReals : CoverClaim::Unknown;
    return CoverStream{Stream<Interval>(std::move(out)), claim};
}

/// A rational of base missed by every interval of the prefix, if one exists.
inline std::optional<Rational> no_finite_subcover_witness(const Interval& base,
                                                          const std::vector<Interval>& prefix) {
    return uncovered_point(base, normalize(prefix, Kind::Open));
}

/// Keeps every interval strictly inside (-1/4, 5/4), insetting by 2^-10 and
/// dropping intervals that become empty.
inline CoverStream clamp_cover(const CoverStream& cov) {
    Rational lo = Rational(-1, 4) + Rational::pow2(-10);
    Rational hi = Rational(5, 4) - Rational::pow2(-10);
    return CoverStream{cov.intervals.filter_map([lo, hi](const Interval& i) -> std::optional<Interval> {
                           Rational a = max(i.lo, lo);
                           Rational b = min(i.hi, hi);
                           if (!(a < b)) return std::nullopt;
                           return Interval::open(a, b);
                       }),
                       cov.claim};
}

}  // namespace rmtw
