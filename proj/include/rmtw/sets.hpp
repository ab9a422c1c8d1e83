#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rmtw/enumeration.hpp"
#include "rmtw/errors.hpp"
#include "rmtw/interval.hpp"
#include "rmtw/rational.hpp"
#include "rmtw/real.hpp"
#include "rmtw/stream.hpp"

namespace rmtw {

/// Open ball (center - radius, center + radius) with radius > 0.
struct Ball {
    Rational center;
    Rational radius;

    Ball(Rational c, Rational r) : center(std::move(c)), radius(std::move(r)) {
        if (radius.sign() <= 0) throw Error(ErrorKind::Parse, "ball radius must be positive");
    }

    static Ball from_interval(const Interval& i) { return Ball(i.mid(), i.length() / Rational(2)); }
    Interval as_interval() const { return Interval::open(center - radius, center + radius); }

    friend bool operator==(const Ball&, const Ball&) = default;
};

using BallStream = Stream<Ball>;

/// Open set coded by positive information: the union of the enumerated balls.
struct OpenSetCode {
    BallStream balls;
};

/// Closed set coded by negative information: the complement of the balls.
struct ClosedSetCode {
    BallStream complement;
};

/// Separably closed set: the closure of the listed points.
struct SepClosedCode {
    Stream<RealCode> points;
};

/// Nets witnessing total boundedness: every point of the space is within
/// 2^-i of some point of nets(i).
struct CompactnessWitness {
    std::vector<Rational> nets(std::size_t i) const {
        std::vector<Rational> out;
        std::uint64_t n = std::uint64_t{1} << i;
        out.reserve(n + 1);
        Rational step = Rational::pow2(-static_cast<long>(i));
        for (std::uint64_t j = 0; j <= n; ++j) out.push_back(Rational(static_cast<long>(j)) * step);
        return out;
    }
};

/// Dyadic witness <j 2^-i : j <= 2^i> for [0,1].
inline CompactnessWitness unit_compactness_witness() { return {}; }

/// Stage/precision-bounded verdict on a semi-decidable membership.
struct BallVerdict {
    bool certified = false;
    std::size_t ball = 0;  // index of the certifying ball
};

namespace detail {

// |x - a| < r certified at some precision j <= prec.
inline bool ball_certifies(const RealCode& x, std::size_t prec, const Ball& b) {
    if (const auto& c = x.constant_value())
        return (*c - b.center).abs() + Rational::pow2(-static_cast<long>(prec)) < b.radius;
    for (std::size_t j = 0; j <= prec; ++j) {
        if ((x.term(j) - b.center).abs() + Rational::pow2(-static_cast<long>(j)) < b.radius)
            return true;
    }
    return false;
}

inline BallVerdict first_certifying_ball(const BallStream& balls, const RealCode& x,
                                         std::size_t stage, std::size_t prec) {
    x.check_prefix(prec);
    for (const auto& [idx, b] : balls.indexed_prefix(stage))
        if (ball_certifies(x, prec, b)) return {true, idx};
    return {};
}

}  // namespace detail

/// In(s) when some ball with index <= stage provably contains x; a verdict
/// never downgrades as stage or prec grow.
inline BallVerdict open_member_at(const OpenSetCode& u, const RealCode& x, std::size_t stage,
                                  std::size_t prec) {
    return detail::first_certifying_ball(u.balls, x, stage, prec);
}

/// Out(s) when x is certified inside a complement ball with index <= stage.
inline BallVerdict closed_member_refuted_at(const ClosedSetCode& c, const RealCode& x,
                                            std::size_t stage, std::size_t prec) {
    return detail::first_certifying_ball(c.complement, x, stage, prec);
}

struct SepVerdict {
    bool witnessed = false;
    std::size_t index = 0;
};

namespace detail {

// |x - y| < q, certified by approximations at some precision.
inline bool certified_close(const RealCode& x, const RealCode& y, const Rational& q) {
    if (x.constant_value() && y.constant_value())
        return (*x.constant_value() - *y.constant_value()).abs() < q;
    std::size_t cap = static_cast<std::size_t>(neg_log2_ceil(q)) + 32;
    x.check_prefix(cap);
    y.check_prefix(cap);
    for (std::size_t k = 0; k <= cap; ++k) {
        Rational slack = Rational::pow2(1 - static_cast<long>(k));
        if ((x.term(k) - y.term(k)).abs() + slack < q) return true;
    }
    return false;
}

}  // namespace detail

/// Witnessed(n) for the least n <= budget with |x - x_n| < q certified.
inline SepVerdict sep_member_at(const SepClosedCode& s, const RealCode& x, const Rational& q,
                                std::size_t budget) {
    if (q.sign() <= 0) throw Error(ErrorKind::Parse, "sep_member_at needs q > 0");
    auto len = s.points.length();
    for (std::size_t i = 0; i <= budget && (!len || i < *len); ++i)
        if (auto pt = s.points.at(i); pt && detail::certified_close(x, *pt, q)) return {true, i};
    return {};
}

/// Stage-s over-approximation of C intersected with ambient: ambient minus
/// the balls at positions < stage.
inline IntervalSet snapshot_complement(const ClosedSetCode& c, std::size_t stage,
                                       const Interval& ambient) {
    std::vector<Interval> removed;
    for (const auto& b : c.complement.prefix(stage)) removed.push_back(b.as_interval());
    return subtract(ambient, normalize(std::move(removed), Kind::Open));
}

namespace detail {

inline void check_pairwise_disjoint(const std::vector<Interval>& js) {
    for (std::size_t a = 0; a < js.size(); ++a) {
        if (!js[a].is_closed())
            throw Error(ErrorKind::DisjointnessViolation, "J_" + std::to_string(a) + " is not closed");
        for (std::size_t b = a + 1; b < js.size(); ++b)
            if (intersects(js[a], js[b]))
                throw Error(ErrorKind::DisjointnessViolation,
                            "J_" + std::to_string(a) + " = " + js[a].str() + " meets J_" +
                                std::to_string(b) + " = " + js[b].str());
    }
}

}  // namespace detail

/// Point listing of {0} together with every rational of every J_e.
///
/// Position 0 is the point 0. For a family of K intervals, position i >= 1
/// lists the n-th rational of J_e with e = (i-1) mod K and n = (i-1) div K,
/// where the n-th rational of J_e is the affine image of unit_rational(n).
/// Round-robin over a finite family is a bijection onto pairs (e, n).
inline SepClosedCode dense_sequence(std::vector<Interval> js) {
    detail::check_pairwise_disjoint(js);
    auto family = std::make_shared<const std::vector<Interval>>(std::move(js));
    return SepClosedCode{Stream<RealCode>([family](std::size_t i) -> std::optional<RealCode> {
        if (i == 0 || family->empty()) return RealCode::constant(Rational(0));
        std::size_t k = family->size();
        const Interval& j = (*family)[(i - 1) % k];
        Rational t = unit_rational((i - 1) / k);
        return RealCode::constant(j.lo + t * j.length());
    })};
}

/// Decidable set variant: q is accepted iff q = 0 or q lies in some J_e with
/// e < rational_code(q).
inline bool rational_set_variant(const std::vector<Interval>& js, const Rational& q) {
    if (q.is_zero()) return true;
    mpz_class code = rational_code(q);
    for (std::size_t e = 0; e < js.size() && mpz_class(static_cast<unsigned long>(e)) < code; ++e)
        if (js[e].contains(q)) return true;
    return false;
}

}  // namespace rmtw
