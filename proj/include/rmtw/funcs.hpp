#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmtw/errors.hpp"
#include "rmtw/interval.hpp"
#include "rmtw/rational.hpp"
#include "rmtw/real.hpp"
#include "rmtw/sets.hpp"
#include "rmtw/stream.hpp"

namespace rmtw {

/// One enumerated pair of balls: inputs near a map into the closed ball
/// around b of radius s.
struct Generator {
    Rational a, r, b, s;

    friend bool operator==(const Generator&, const Generator&) = default;
};

/// Code of a continuous partial function [0,1] -> R.
///
/// Only generators are stored. The coded relation is their closure under
/// input refinement and output enlargement (see phi_holds), which satisfies
/// the refinement and enlargement conditions by construction.
struct FuncCode {
    Stream<Generator> generators;
};

namespace detail {

// <x, rx> equal to, or strictly inside, <y, ry>: |x - y| + rx < ry.
inline bool ball_within(const Rational& x, const Rational& rx, const Rational& y,
                        const Rational& ry) {
    if (x == y && rx == ry) return true;
    return (x - y).abs() + rx < ry;
}

}  // namespace detail

/// Derived relation <a,r> Phi <b,s> restricted to generators with index <= stage.
inline bool phi_holds(const FuncCode& phi, const Rational& a, const Rational& r, const Rational& b,
                      const Rational& s, std::size_t stage) {
    for (const auto& [idx, g] : phi.generators.indexed_prefix(stage)) {
        if (detail::ball_within(a, r, g.a, g.r) && detail::ball_within(g.b, g.s, b, s)) return true;
    }
    return false;
}

struct ConsistencyViolation {
    std::size_t first, second;
    std::string detail;
};

/// Pairs of generators whose input balls overlap but whose output balls are
/// farther apart than s + s'. Empty result means the prefix is consistent.
inline std::vector<ConsistencyViolation> check_consistency(const FuncCode& phi, std::size_t stage) {
    auto gens = phi.generators.indexed_prefix(stage);
    std::vector<ConsistencyViolation> out;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto& [ii, g] = gens[i];
        for (std::size_t j = i + 1; j < gens.size(); ++j) {
            const auto& [jj, h] = gens[j];
            if ((g.a - h.a).abs() >= g.r + h.r) continue;
            Rational d = (g.b - h.b).abs();
            if (d > g.s + h.s)
                out.push_back({ii, jj,
                               "|" + g.b.str() + " - " + h.b.str() + "| = " + d.str() + " > " +
                                   (g.s + h.s).str()});
        }
    }
    return out;
}

struct EvalVerdict {
    bool found = false;
    Rational b, s;
    std::size_t generator = 0;
};

/// Searches generators <= stage_budget for one with s < q whose input ball
/// provably contains x. Not found means either x is outside the domain or
/// the budget is too small; the two are indistinguishable.
inline EvalVerdict eval_at(const FuncCode& phi, const RealCode& x, const Rational& q,
                           std::size_t stage_budget) {
    for (const auto& [idx, g] : phi.generators.indexed_prefix(stage_budget)) {
        if (!(g.s < q)) continue;
        if (detail::certified_close(x, RealCode::constant(g.a), g.r)) return {true, g.b, g.s, idx};
    }
    return {};
}

/// h : N -> N.
class Modulus {
public:
    using Fn = std::function<std::uint64_t(std::uint64_t)>;

    Modulus() : Modulus([](std::uint64_t n) { return n; }) {}
    explicit Modulus(Fn h) : h_(std::move(h)) {}

    /// h(n) = slope * n + offset.
    static Modulus affine(std::uint64_t slope, std::uint64_t offset) {
        return Modulus([=](std::uint64_t n) { return slope * n + offset; });
    }

    std::uint64_t operator()(std::uint64_t n) const { return h_(n); }

private:
    Fn h_;
};

/// Constant value on a closed rational support. `block` optionally records
/// which dyadic block I_e the support belongs to (-1 when unknown).
struct Piece {
    Interval support;
    Rational value;
    int block = -1;
};

/// Exact piecewise-constant function on finitely many disjoint closed
/// supports, optionally with the anchor f(0) = 0.
struct PieceTable {
    std::vector<Piece> pieces;
    bool anchor = false;

    /// Value at x, if x lies in some support (or is the anchor point).
    std::optional<Rational> value_at(const Rational& x) const {
        if (anchor && x.is_zero()) return Rational(0);
        for (const auto& p : pieces)
            if (p.support.contains(x)) return p.value;
        return std::nullopt;
    }

    /// Pieces sorted by support, anchor (if any) first as a point piece.
    std::vector<Piece> sorted_with_anchor() const {
        std::vector<Piece> all = pieces;
        if (anchor) all.push_back({Interval::closed(0, 0), Rational(0), -1});
        std::sort(all.begin(), all.end(),
                  [](const Piece& x, const Piece& y) { return x.support.lo < y.support.lo; });
        for (std::size_t i = 1; i < all.size(); ++i)
            if (intersects(all[i - 1].support, all[i].support))
                throw Error(ErrorKind::OverlappingPieces,
                            all[i - 1].support.str() + " meets " + all[i].support.str());
        return all;
    }
};

/// Which argument of the modulus bound applies to a close pair x < y with y
/// in block e: e <= n forces both points into the same block, e > n forces
/// both values small.
enum class ModulusCase { SameBlock, SmallValues, Unclassified };

struct ModulusTraceEntry {
    std::uint64_t n;
    Interval left, right;
    int right_block;
    ModulusCase which;
};

struct ModulusCheck {
    bool ok = true;
    std::optional<ModulusTraceEntry> counterexample;
    std::string diagnostic;
    std::vector<ModulusTraceEntry> trace;  // every close pair inspected

    std::size_t count(ModulusCase c) const {
        return static_cast<std::size_t>(std::count_if(
            trace.begin(), trace.end(), [c](const ModulusTraceEntry& t) { return t.which == c; }));
    }
};

/// Exact validity of h as a modulus of f for n_min <= n <= n_max.
///
/// For piecewise-constant f, h fails at n exactly when two supports lie
/// closer than 2^-h(n) while their values differ by at least 2^-n.
inline ModulusCheck modulus_check_exact(const PieceTable& f, const Modulus& h, std::uint64_t n_max,
                                        std::uint64_t n_min = 0) {
    ModulusCheck out;
    auto all = f.sorted_with_anchor();
    for (std::uint64_t n = n_min; n <= n_max; ++n) {
        Rational delta = Rational::pow2(-static_cast<long>(h(n)));
        Rational bound = Rational::pow2(-static_cast<long>(n));
        for (std::size_t i = 0; i < all.size(); ++i) {
            for (std::size_t j = i + 1; j < all.size(); ++j) {
                // Supports are disjoint and sorted, so gaps only grow with j.
                if (all[j].support.lo - all[i].support.hi >= delta) break;
                int blk = all[j].block;
                ModulusCase which = blk < 0 ? ModulusCase::Unclassified
                                  : static_cast<std::uint64_t>(blk) <= n ? ModulusCase::SameBlock
                                                                         : ModulusCase::SmallValues;
                ModulusTraceEntry entry{n, all[i].support, all[j].support, blk, which};
                out.trace.push_back(entry);
                if ((all[i].value - all[j].value).abs() >= bound && out.ok) {
                    out.ok = false;
                    out.counterexample = entry;
                    out.diagnostic = "n=" + std::to_string(n) + ": " + all[i].support.str() + " -> " +
                                     all[i].value.str() + " and " + all[j].support.str() + " -> " +
                                     all[j].value.str() + " are " +
                                     (all[j].support.lo - all[i].support.hi).str() +
                                     " apart, below 2^-" + std::to_string(h(n));
                }
            }
        }
    }
    return out;
}

/// Piecewise-linear function on [0,1] given by knots with strictly
/// increasing x, the first at 0 and the last at 1.
class PLFunction {
public:
    using Knot = std::pair<Rational, Rational>;

    explicit PLFunction(std::vector<Knot> knots) : knots_(std::move(knots)) {
        if (knots_.size() < 2 || !knots_.front().first.is_zero() || knots_.back().first != Rational(1))
            throw Error(ErrorKind::OutOfDomain, "knots must start at x = 0 and end at x = 1");
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (!(knots_[i - 1].first < knots_[i].first))
                throw Error(ErrorKind::OutOfDomain, "knot x-coordinates must strictly increase");
    }

    static PLFunction constant(const Rational& v) { return PLFunction({{0, v}, {1, v}}); }

    const std::vector<Knot>& knots() const { return knots_; }

    /// Largest |dy/dx| over all segments.
    Rational lipschitz() const {
        Rational L(0);
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            Rational slope =
                ((knots_[i].second - knots_[i - 1].second) / (knots_[i].first - knots_[i - 1].first)).abs();
            if (slope > L) L = slope;
        }
        return L;
    }

private:
    std::vector<Knot> knots_;
};

/// Exact linear interpolation.
inline Rational pl_eval(const PLFunction& f, const Rational& x) {
    const auto& k = f.knots();
    if (x.sign() < 0 || x > Rational(1)) throw Error(ErrorKind::OutOfDomain, x.str() + " outside [0,1]");
    auto it = std::lower_bound(k.begin(), k.end(), x,
                               [](const PLFunction::Knot& kn, const Rational& v) { return kn.first < v; });
    if (it->first == x) return it->second;
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *std::prev(it);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

/// h(n) = n + ceil(log2 L) when the Lipschitz constant L exceeds 1, else h(n) = n.
inline Modulus pl_modulus(const PLFunction& f) {
    long shift = ceil_log2(f.lipschitz());
    return Modulus::affine(1, static_cast<std::uint64_t>(shift));
}

/// Generators (a, 2^-i, F(a), (L+1) 2^-i) for dyadic a = j 2^-i, i <= density.
inline FuncCode pl_to_code(const PLFunction& f, std::size_t density) {
    Rational L = f.lipschitz();
    std::vector<Generator> gens;
    for (std::size_t i = 0; i <= density; ++i) {
        Rational w = Rational::pow2(-static_cast<long>(i));
        std::uint64_t n = std::uint64_t{1} << i;
        for (std::uint64_t j = 0; j <= n; ++j) {
            Rational a = Rational(static_cast<long>(j)) * w;
            gens.push_back({a, w, pl_eval(f, a), L * w + w});
        }
    }
    return FuncCode{Stream<Generator>(std::move(gens))};
}

/// Polynomial with rational coefficients, lowest degree first.
struct Polynomial {
    std::vector<Rational> coeffs;

    Rational operator()(const Rational& x) const {
        Rational acc(0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < coeffs.size(); ++i) s += (i ? " " : "") + coeffs[i].str();
        return s.empty() ? "0" : s;
    }
};

/// |f(q) - p(q)| < 2^-n, evaluated exactly.
inline bool weierstrass_check(const Polynomial& p, const PieceTable& f, const Rational& q, std::uint64_t n) {
    auto v = f.value_at(q);
    if (!v) throw Error(ErrorKind::PointNotInDomain, q.str() + " lies in no piece");
    return (*v - p(q)).abs() < Rational::pow2(-static_cast<long>(n));
}

}  // namespace rmtw
