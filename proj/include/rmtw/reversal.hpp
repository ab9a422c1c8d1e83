#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rmtw/construction.hpp"
#include "rmtw/errors.hpp"
#include "rmtw/funcs.hpp"
#include "rmtw/interval.hpp"
#include "rmtw/rational.hpp"
#include "rmtw/sets.hpp"
#include "rmtw/wkl.hpp"

namespace rmtw {

/// True iff no s <= k has g0(s) = e or g1(s) = e, i.e. local interval k of
/// every I_{e,m} still goes into the complement of E.
inline bool complement_guard(const SeparationInstance& inst, std::uint64_t e, std::uint64_t k) {
    auto hit = inst.first_hit(e);
    return !hit || hit->stage > k;
}

/// Complement code of E restricted to e <= e_max, m <= m_max, k <= stage.
/// Visits k outermost so that every (e, m) progresses at the same rate.
inline ClosedSetCode e_complement(Plan& plan, const SeparationInstance& inst, std::size_t stage,
                                  std::uint64_t e_max, std::uint64_t m_max) {
    std::vector<CoverStream> locals;
    std::vector<std::uint64_t> blocks;
    for (std::uint64_t e = 0; e <= e_max; ++e)
        for (std::uint64_t m = 0; m <= m_max; ++m) {
            locals.push_back(local_cover(plan.cover(), plan.entry(e, m)));
            blocks.push_back(e);
        }
    std::vector<Ball> balls;
    for (std::size_t k = 0; k <= stage; ++k)
        for (std::size_t i = 0; i < locals.size(); ++i) {
            if (!complement_guard(inst, blocks[i], k)) continue;
            if (auto iv = locals[i].intervals.at(k)) balls.push_back(Ball::from_interval(*iv));
        }
    return ClosedSetCode{BallStream(std::move(balls))};
}

/// I_{e,m} intersected with the stage-s snapshot of E.
inline IntervalSet e_snapshot(Plan& plan, const SeparationInstance& inst, std::uint64_t e,
                              std::uint64_t m, std::size_t stage) {
    const PlanEntry& p = plan.entry(e, m);
    CoverStream lc = local_cover(plan.cover(), p);
    std::vector<Interval> removed;
    for (std::size_t k = 0; k <= stage && complement_guard(inst, e, k); ++k)
        if (auto iv = lc.intervals.at(k)) removed.push_back(*iv);
    return subtract(p.interval, normalize(std::move(removed), Kind::Open));
}

/// One component J of the structured snapshot of C, tagged with its (e, m).
struct CComponent {
    Interval support;
    std::uint64_t e, m;
};

/// Stage-s snapshot of C = D n E as explicit disjoint closed components
/// (the point 0 belongs to C as well and is left implicit).
inline std::vector<CComponent> c_structured(Plan& plan, const SeparationInstance& inst, std::size_t stage,
                                            std::uint64_t e_max, std::uint64_t m_max) {
    std::vector<CComponent> out;
    for (std::uint64_t e = 0; e <= e_max; ++e)
        for (std::uint64_t m = 0; m <= m_max; ++m)
            for (const auto& c : e_snapshot(plan, inst, e, m, stage)) out.push_back({c, e, m});
    return out;
}

inline std::vector<Interval> supports(const std::vector<CComponent>& cs) {
    std::vector<Interval> out;
    out.reserve(cs.size());
    for (const auto& c : cs) out.push_back(c.support);
    return out;
}

/// Value f takes on block e once e is hit: +2^-2e for g0, -2^-2e for g1.
inline Rational block_value(std::uint64_t e, SeparationInstance::Side side) {
    Rational v = Rational::pow2(-static_cast<long>(2 * e));
    return side == SeparationInstance::Side::G0 ? v : -v;
}

/// Pieces of f for every block hit by stage `stage`, over m <= m_depth.
inline PieceTable f_pieces(Plan& plan, const SeparationInstance& inst, std::size_t stage,
                           std::uint64_t m_depth) {
    PieceTable t;
    t.anchor = true;
    std::set<std::uint64_t> hit_blocks;
    for (auto v : inst.range0()) hit_blocks.insert(v);
    for (auto v : inst.range1()) hit_blocks.insert(v);
    for (auto e : hit_blocks) {
        auto hit = inst.first_hit(e);
        if (!hit || hit->stage > stage) continue;
        Rational v = block_value(e, hit->side);
        for (std::uint64_t m = 0; m <= m_depth; ++m)
            for (const auto& c : e_snapshot(plan, inst, e, m, stage))
                t.pieces.push_back({c, v, static_cast<int>(e)});
    }
    std::sort(t.pieces.begin(), t.pieces.end(),
              [](const Piece& a, const Piece& b) { return a.support.lo < b.support.lo; });
    return t;
}

/// Generators certifying f on its pieces plus the anchor family at 0.
///
/// A piece [u, w] in block e with value v gets balls
/// (mid, (w-u)/2 + 2^-j, v, 2^-j) for j0 <= j <= j0 + levels, where
/// 2^-j0 is below half the distance to every piece with another value and
/// below the distance from u to the left end of I_e. The anchor family
/// (0, 2^-(2e+1), 0, 2^-2(e+1)), e <= anchor_max, pins f(0) = 0.
inline FuncCode f_code(const PieceTable& f, std::uint64_t levels, std::uint64_t anchor_max) {
    std::vector<Generator> gens;
    for (std::uint64_t e = 0; e <= anchor_max; ++e)
        gens.push_back({Rational(0), Rational::pow2(-static_cast<long>(2 * e + 1)), Rational(0),
                        Rational::pow2(-static_cast<long>(2 * e + 2))});
    const auto& ps = f.pieces;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const Piece& p = ps[i];
        std::optional<Rational> clearance;
        auto tighten = [&](const Rational& c) {
            if (!clearance || c < *clearance) clearance = c;
        };
        for (std::size_t j = 0; j < ps.size(); ++j)
            if (j != i && ps[j].value != p.value) tighten(gap(p.support, ps[j].support) / Rational(2));
        if (p.block >= 0) tighten(p.support.lo - base_interval(static_cast<std::uint64_t>(p.block)).lo);
        tighten(p.support.lo / Rational(2));  // keep clear of the anchor point itself
        std::uint64_t j0 = static_cast<std::uint64_t>(neg_log2_ceil(*clearance)) + 1;
        Rational half = p.support.length() / Rational(2);
        for (std::uint64_t j = j0; j <= j0 + levels; ++j) {
            Rational w = Rational::pow2(-static_cast<long>(j));
            gens.push_back({p.support.mid(), half + w, p.value, w});
        }
    }
    return FuncCode{Stream<Generator>(std::move(gens))};
}

struct FBuild {
    PieceTable pieces;
    FuncCode code;
};

inline FBuild f_build(Plan& plan, const SeparationInstance& inst, std::size_t stage, std::uint64_t m_depth,
                      std::uint64_t levels = 24) {
    PieceTable t = f_pieces(plan, inst, stage, m_depth);
    std::uint64_t anchor_max = 0;
    for (const auto& p : t.pieces) anchor_max = std::max<std::uint64_t>(anchor_max, p.block + 1);
    FuncCode code = f_code(t, levels, anchor_max);
    return {std::move(t), std::move(code)};
}

/// h(n) = 2n + 2.
inline Modulus modulus_h() { return Modulus::affine(2, 2); }

/// Continuous extension of a finite piece table to [0,1]: knots at 0
/// (value 0), at both ends of every piece (piece value) and at 1 (value of
/// the rightmost piece, or 0); linear in between.
inline PLFunction pl_extension_double(const PieceTable& fp) {
    PieceTable with_anchor = fp;
    with_anchor.anchor = false;
    auto sorted = with_anchor.sorted_with_anchor();  // overlap check
    std::vector<PLFunction::Knot> knots;
    auto add = [&](const Rational& x, const Rational& y) {
        if (!knots.empty() && knots.back().first == x) {
            if (knots.back().second != y)
                throw Error(ErrorKind::OverlappingPieces, "conflicting values at " + x.str());
            return;
        }
        knots.emplace_back(x, y);
    };
    if (sorted.empty() || sorted.front().support.lo.sign() > 0) add(Rational(0), Rational(0));
    for (const auto& p : sorted) {
        if (p.support.lo.sign() < 0 || p.support.hi > Rational(1))
            throw Error(ErrorKind::OutOfDomain, "piece " + p.support.str() + " leaves [0,1]");
        add(p.support.lo, p.value);
        add(p.support.hi, p.value);
    }
    if (knots.back().first != Rational(1)) add(Rational(1), sorted.empty() ? Rational(0) : sorted.back().value);
    return PLFunction(std::move(knots));
}

/// Another valid extension: random extra knots inside off-piece gaps of width
/// at least min_gap, displaced by up to 2 x (gap width) from the base double.
inline PLFunction randomized_double(const PieceTable& fp, std::mt19937_64& rng,
                                    const Rational& min_gap = Rational::pow2(-10)) {
    PLFunction base = pl_extension_double(fp);
    std::set<std::pair<std::string, std::string>> on_piece;
    for (const auto& p : fp.pieces) on_piece.emplace(p.support.lo.str(), p.support.hi.str());
    std::uniform_int_distribution<int> coin(0, 1), where(4, 12), shift(-16, 16);
    std::vector<PLFunction::Knot> knots;
    const auto& k = base.knots();
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        knots.push_back(k[i]);
        const auto& [x0, y0] = k[i];
        const auto& [x1, y1] = k[i + 1];
        Rational w = x1 - x0;
        if (w < min_gap || on_piece.count({x0.str(), x1.str()}) || coin(rng) == 0) continue;
        Rational t(where(rng), 16);
        Rational x = x0 + w * t;
        Rational y = y0 + (y1 - y0) * t + w * Rational(shift(rng), 8);
        knots.emplace_back(x, y);
    }
    knots.push_back(k.back());
    return PLFunction(std::move(knots));
}

/// First support point where F disagrees with the piece value, checked at
/// both ends and the midpoint of every piece.
inline std::optional<std::string> extension_mismatch(const PLFunction& F, const PieceTable& f) {
    if (f.anchor && !pl_eval(F, Rational(0)).is_zero())
        return "F(0) = " + pl_eval(F, Rational(0)).str() + " but f(0) = 0";
    for (const auto& p : f.pieces)
        for (const Rational& x : {p.support.lo, p.support.mid(), p.support.hi}) {
            Rational y = pl_eval(F, x);
            if (y != p.value)
                return "F(" + x.str() + ") = " + y.str() + " but f = " + p.value.str() + " on " + p.support.str();
        }
    return std::nullopt;
}

using Evaluable = std::variant<PLFunction, FuncCode>;

struct DecodeResult {
    std::uint64_t e = 0;
    std::uint64_t m = 0;
    Rational point;   // q_{e,m}
    Rational approx;  // within 2^-(2e+2) of F(q_{e,m})
    bool member = false;
};

/// e in X iff a 2^-(2e+2)-approximation of F(q_{e,m}) with m = H(2e+2) is >= 0.
inline DecodeResult decode(const Evaluable& F, const Modulus& H, std::uint64_t e, Plan& plan,
                           std::size_t eval_budget) {
    DecodeResult r;
    r.e = e;
    r.m = H(2 * e + 2);
    r.point = plan.entry(e, r.m).point;
    if (const auto* pl = std::get_if<PLFunction>(&F)) {
        r.approx = pl_eval(*pl, r.point);
    } else {
        Rational target = Rational::pow2(-static_cast<long>(2 * e + 2));
        auto v = eval_at(std::get<FuncCode>(F), RealCode::constant(r.point), target, eval_budget);
        if (!v.found)
            throw Error(ErrorKind::EvalBudgetExceeded,
                        "no generator pins F(" + r.point.str() + ") to within " + target.str() + " in " +
                            std::to_string(eval_budget) + " generators");
        r.approx = v.b;
    }
    r.member = r.approx.sign() >= 0;
    return r;
}

struct RunBudgets {
    std::optional<std::uint64_t> e_max;  // defaults to the largest observed value
    std::uint64_t m_max = 48;            // plan depth cap
    std::size_t stage_budget = 4096;     // cover positions scanned per plan step
    std::size_t eval_budget = 100000;
    std::uint64_t verify_m = 4;          // plan invariants checked for m <= verify_m
    std::uint64_t modulus_n = 10;
    std::size_t consistency_prefix = 500;
    std::size_t random_doubles = 0;
    std::uint64_t seed = 0;
};

struct CheckResult {
    std::string name;
    bool ok = true;
    std::string detail;
};

struct DoubleRun {
    std::string label;
    std::uint64_t depth = 0;   // pieces built for m <= depth
    Rational lipschitz;
    std::map<std::uint64_t, bool> x;
    std::vector<DecodeResult> traces;
};

struct SeparationReport {
    SeparationInstance instance;
    RunBudgets budgets;
    std::uint64_t e_max = 0;
    std::map<std::uint64_t, bool> x;  // from the primary double
    std::vector<DoubleRun> doubles;
    std::vector<CheckResult> checks;
    std::vector<std::string> errors;
    PieceTable f;

    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.ok; });
    }
    /// 0 = every check passed, 1 = an invariant failed, 2 = budget or contract error.
    int exit_code() const { return !errors.empty() ? 2 : all_passed() ? 0 : 1; }

    std::set<std::uint64_t> members() const {
        std::set<std::uint64_t> s;
        for (const auto& [e, in] : x)
            if (in) s.insert(e);
        return s;
    }
};

/// Builds a double from the pieces of f at some depth.
using DoubleFactory = std::function<PLFunction(const PieceTable&)>;

namespace detail {

inline std::size_t last_observed_stage(const SeparationInstance& inst) {
    std::size_t s = 0;
    if (!inst.g0.empty()) s = std::max<std::size_t>(s, inst.g0.rbegin()->first);
    if (!inst.g1.empty()) s = std::max<std::size_t>(s, inst.g1.rbegin()->first);
    return s;
}

inline std::string join(const std::set<std::uint64_t>& s) {
    std::string out;
    for (auto v : s) out += (out.empty() ? "" : ",") + std::to_string(v);
    return out;
}

}  // namespace detail

/// The full pipeline on one instance: plan, E, C, f with h(n) = 2n+2, the
/// extension double(s) with their own moduli, and the decoded set X.
///
/// Plan depth is demand driven: pieces are built to a depth M, the double
/// and its modulus H are formed, and M grows until H(2e+2) <= M for every
/// decoded e.
inline SeparationReport run_reversal(const SeparationInstance& inst, const CoverStream& cover,
                                     const RunBudgets& budgets, Plan* shared_plan = nullptr,
                                     const DoubleFactory& primary = pl_extension_double) {
    SeparationReport rep;
    rep.instance = inst;
    rep.budgets = budgets;
    try {
        inst.validate();
        std::set<std::uint64_t> r0 = inst.range0(), r1 = inst.range1();
        std::uint64_t observed_max = 0;
        for (auto v : r0) observed_max = std::max(observed_max, v);
        for (auto v : r1) observed_max = std::max(observed_max, v);
        rep.e_max = budgets.e_max.value_or(observed_max);

        std::optional<Plan> own;
        if (!shared_plan) own.emplace(clamp_cover(cover), budgets.stage_budget, budgets.m_max);
        Plan& plan = shared_plan ? *shared_plan : *own;
        std::size_t stage = detail::last_observed_stage(inst);

        auto fit = [&](const std::string& label, const std::function<PLFunction(const PieceTable&)>& make)
            -> std::pair<DoubleRun, PieceTable> {
            std::uint64_t depth = 2 * rep.e_max + 2;
            for (int round = 0; round < 32; ++round) {
                PieceTable f = f_pieces(plan, inst, stage, depth);
                PLFunction F = make(f);
                Modulus H = pl_modulus(F);
                std::uint64_t need = 0;
                for (std::uint64_t e = 0; e <= rep.e_max; ++e) need = std::max(need, H(2 * e + 2));
                if (need > depth) {
                    depth = need;
                    continue;
                }
                DoubleRun run;
                run.label = label;
                run.depth = depth;
                run.lipschitz = F.lipschitz();
                for (std::uint64_t e = 0; e <= rep.e_max; ++e) {
                    auto d = decode(F, H, e, plan, budgets.eval_budget);
                    run.x[e] = d.member;
                    run.traces.push_back(d);
                }
                if (auto bad = extension_mismatch(F, f))
                    rep.checks.push_back({"extension[" + label + "]", false, *bad});
                else
                    rep.checks.push_back({"extension[" + label + "]", true, ""});

                // Geometry behind the decoder: L |I_{e,m}| < 2^-(2e+2) on hit blocks.
                std::string geo;
                for (const auto& d : run.traces) {
                    if (!r0.count(d.e) && !r1.count(d.e)) continue;
                    Rational spread = F.lipschitz() * plan.entry(d.e, d.m).interval.length();
                    if (!(spread < Rational::pow2(-static_cast<long>(2 * d.e + 2))))
                        geo += "e=" + std::to_string(d.e) + " spread " + spread.str() + "; ";
                }
                rep.checks.push_back({"geometry[" + label + "]", geo.empty(), geo});

                std::set<std::uint64_t> wrong0, wrong1;
                for (auto e : r0)
                    if (e <= rep.e_max && !run.x[e]) wrong0.insert(e);
                for (auto e : r1)
                    if (e <= rep.e_max && run.x[e]) wrong1.insert(e);
                std::string why;
                if (!wrong0.empty()) why += "range(g0) members decoded out of X: " + detail::join(wrong0) + "; ";
                if (!wrong1.empty()) why += "range(g1) members decoded into X: " + detail::join(wrong1);
                rep.checks.push_back({"separation[" + label + "]", why.empty(), why});
                return {std::move(run), std::move(f)};
            }
            throw Error(ErrorKind::PlanDepthExceeded, "double '" + label + "' modulus never settled");
        };

        auto [main_run, f] = fit("primary", primary);
        rep.x = main_run.x;
        rep.doubles.push_back(std::move(main_run));
        rep.f = f;

        for (std::size_t i = 0; i < budgets.random_doubles; ++i) {
            std::uint64_t seed = budgets.seed * 1000003ULL + i;
            auto [run, _] = fit("random-" + std::to_string(i), [seed](const PieceTable& t) {
                std::mt19937_64 rng(seed);
                return randomized_double(t, rng);
            });
            rep.doubles.push_back(std::move(run));
        }

        auto mod = modulus_check_exact(rep.f, modulus_h(), budgets.modulus_n);
        rep.checks.push_back({"modulus", mod.ok,
                              mod.ok ? "close pairs: " + std::to_string(mod.count(ModulusCase::SameBlock)) +
                                           " same-block, " +
                                           std::to_string(mod.count(ModulusCase::SmallValues)) + " small-values"
                                     : mod.diagnostic});

        FuncCode code = f_code(rep.f, 24, rep.e_max + 2);
        auto viol = check_consistency(code, budgets.consistency_prefix - 1);
        rep.checks.push_back({"fcode-consistency", viol.empty(),
                              viol.empty() ? "" : "generators " + std::to_string(viol[0].first) + "," +
                                                      std::to_string(viol[0].second) + ": " + viol[0].detail});

        std::uint64_t vm = std::min<std::uint64_t>(budgets.verify_m, rep.doubles.front().depth);
        auto pv = verify_plan_invariants(plan.entries(rep.e_max, vm), plan.cover());
        rep.checks.push_back({"plan", pv.empty(),
                              pv.empty() ? "" : "(" + std::to_string(pv[0].e) + "," + std::to_string(pv[0].m) +
                                                    ") item " + pv[0].item + ": " + pv[0].detail});
    } catch (const Error& err) {
        rep.errors.push_back(err.what());
    }
    return rep;
}

}  // namespace rmtw
