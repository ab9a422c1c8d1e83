#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rmtw/enumeration.hpp"
#include "rmtw/errors.hpp"
#include "rmtw/interval.hpp"
#include "rmtw/rational.hpp"
#include "rmtw/sets.hpp"
#include "rmtw/wkl.hpp"

namespace rmtw {

/// I_e = [2^-(2e+1), 2^-2e].
inline Interval base_interval(std::uint64_t e) {
    return Interval::closed(Rational::pow2(-static_cast<long>(2 * e + 1)),
                            Rational::pow2(-static_cast<long>(2 * e)));
}

/// Open gap (2^-(2e+2), 2^-(2e+1)) between I_{e+1} and I_e.
inline Interval block_gap(std::uint64_t e) {
    return Interval::open(Rational::pow2(-static_cast<long>(2 * e + 2)),
                          Rational::pow2(-static_cast<long>(2 * e + 1)));
}

/// Image of a cover under x -> (x + 1) / 2^(2e+1), which carries [0,1] onto I_e.
inline CoverStream transfer_to_block(const CoverStream& cov, std::uint64_t e) {
    Rational scale = Rational::pow2(-static_cast<long>(2 * e + 1));
    return CoverStream{cov.intervals.map([scale](const Interval& i) {
                           return Interval::open((i.lo + Rational(1)) * scale,
                                                 (i.hi + Rational(1)) * scale);
                       }),
                       cov.claim};
}

/// Everything chosen for one (e, m).
struct PlanEntry {
    std::uint64_t e = 0, m = 0;
    Interval interval;     // I_{e,m}, closed
    Rational point;        // q_{e,m}
    Interval helper;       // (c^{e,m}, d^{e,m}), open
    std::uint64_t k = 0;   // k_{e,m}
    IntervalSet leftover;  // U_{e,m}: covered so far minus the I_{e,n}, n <= m

    friend bool operator==(const PlanEntry& a, const PlanEntry& b) {
        return a.e == b.e && a.m == b.m && a.interval == b.interval && a.point == b.point &&
               a.helper == b.helper && a.k == b.k && a.leftover == b.leftover;
    }
};

/// Per-block state threaded through the steps.
///
/// After step m: uncovered = I_e minus the transferred intervals k <= k_{e,m},
/// covered is their union, chosen is the union of I_{e,n} for n <= m.
struct StageState {
    std::uint64_t e = 0;
    std::uint64_t next_m = 0;
    std::optional<std::uint64_t> consumed;  // k high-water mark
    IntervalSet uncovered{Kind::Closed};
    IntervalSet covered{Kind::Open};
    IntervalSet chosen{Kind::Closed};

    static StageState start(std::uint64_t e) {
        StageState s;
        s.e = e;
        s.uncovered = normalize({base_interval(e)}, Kind::Closed);
        return s;
    }
};

/// One step of the pre-domain construction for block e.
///
/// Finds the least k whose interval meets the interior of the leftmost
/// nondegenerate component of the uncovered part, then takes
///   (c, d) = open middle third of that meet,
///   I      = closed middle half of (c, d), shrunk about its center to length
///            at most 2^-(m+1),
///   q      = midpoint of I.
/// Throws Degenerate when no nondegenerate component is left and Stalled
/// when no qualifying interval appears within stage_budget positions.
inline PlanEntry plan_step(StageState& st, const CoverStream& cov_e, std::size_t stage_budget) {
    const Interval* target = nullptr;
    for (const auto& c : st.uncovered)
        if (!c.degenerate()) {
            target = &c;
            break;
        }
    std::string where = "e=" + std::to_string(st.e) + " m=" + std::to_string(st.next_m);
    if (!target)
        throw Error(ErrorKind::Degenerate,
                    where + ": uncovered part " + st.uncovered.str() + " has no nondegenerate component");
    Interval comp = *target;
    Interval comp_interior = Interval::open(comp.lo, comp.hi);

    std::uint64_t first = st.consumed ? *st.consumed + 1 : 0;
    std::vector<Interval> swept;
    std::optional<std::uint64_t> hit;
    Interval meet;
    for (std::uint64_t k = first; k < first + stage_budget; ++k) {
        if (auto len = cov_e.intervals.length(); len && k >= *len) break;
        auto iv = cov_e.intervals.at(k);
        if (!iv) continue;
        swept.push_back(*iv);
        if (auto x = intersect(*iv, comp_interior)) {
            hit = k;
            meet = *x;
            break;
        }
    }
    if (!hit)
        throw Error(ErrorKind::Stalled, where + ": no cover interval meets " + comp.str() + " within " +
                                            std::to_string(stage_budget) + " positions after k=" +
                                            std::to_string(first));

    Rational third = meet.length() / Rational(3);
    Interval helper = Interval::open(meet.lo + third, meet.lo + third + third);
    Rational quarter = helper.length() / Rational(4);
    Rational lo = helper.lo + quarter;
    Rational hi = helper.hi - quarter;
    Rational cap = Rational::pow2(-static_cast<long>(st.next_m + 1));
    if (hi - lo > cap) {
        Rational c = midpoint(lo, hi);
        lo = c - cap / Rational(2);
        hi = c + cap / Rational(2);
    }
    Interval chosen = Interval::closed(lo, hi);

    IntervalSet removed = normalize(swept, Kind::Open);
    st.uncovered = subtract(st.uncovered, removed);
    st.covered = unite(st.covered, removed);
    st.chosen = unite(st.chosen, normalize({chosen}, Kind::Closed));
    st.consumed = *hit;

    PlanEntry out;
    out.e = st.e;
    out.m = st.next_m++;
    out.interval = chosen;
    out.point = chosen.mid();
    out.helper = helper;
    out.k = *hit;
    out.leftover = subtract_closed(st.covered, st.chosen);
    return out;
}

/// Lazily extended pre-domain plan over a fixed (clamped) cover.
///
/// Blocks are independent; within a block steps run in order of m. Entries
/// are computed on demand and cached, so identical covers give identical
/// plans regardless of the order in which entries are requested.
class Plan {
public:
    Plan(CoverStream clamped_cover, std::size_t stage_budget, std::uint64_t max_m = 64)
        : cover_(std::move(clamped_cover)), stage_budget_(stage_budget), max_m_(max_m) {}

    const CoverStream& cover() const { return cover_; }
    std::uint64_t max_m() const { return max_m_; }
    std::size_t stage_budget() const { return stage_budget_; }

    const CoverStream& block_cover(std::uint64_t e) {
        auto it = blocks_.find(e);
        if (it == blocks_.end())
            it = blocks_.emplace(e, Block{transfer_to_block(cover_, e), StageState::start(e), {}}).first;
        return it->second.cover;
    }

    const PlanEntry& entry(std::uint64_t e, std::uint64_t m) {
        if (m > max_m_)
            throw Error(ErrorKind::PlanDepthExceeded,
                        "entry (" + std::to_string(e) + "," + std::to_string(m) + ") beyond depth " +
                            std::to_string(max_m_));
        block_cover(e);
        Block& b = blocks_.at(e);
        while (b.entries.size() <= m) b.entries.push_back(plan_step(b.state, b.cover, stage_budget_));
        return b.entries[m];
    }

    /// All entries with e <= e_max and m <= m_max, ordered by (e, m).
    std::vector<PlanEntry> entries(std::uint64_t e_max, std::uint64_t m_max) {
        std::vector<PlanEntry> out;
        for (std::uint64_t e = 0; e <= e_max; ++e)
            for (std::uint64_t m = 0; m <= m_max; ++m) out.push_back(entry(e, m));
        return out;
    }

private:
    struct Block {
        CoverStream cover;
        StageState state;
        std::deque<PlanEntry> entries;  // stable references while extending
    };

    CoverStream cover_;
    std::size_t stage_budget_;
    std::uint64_t max_m_;
    std::map<std::uint64_t, Block> blocks_;
};

namespace detail {

inline const PlanEntry* find_entry(const std::vector<PlanEntry>& plan, std::uint64_t e, std::uint64_t m) {
    for (const auto& p : plan)
        if (p.e == e && p.m == m) return &p;
    return nullptr;
}

}  // namespace detail

/// Complement code of D = {0} plus every I_{e,m} in the plan.
///
/// Pairs (e, m) are visited in Cantor order; on visiting (e, 0) the block gap
/// below I_e is emitted, then every component of U_{e,m}.
inline ClosedSetCode predomain_code(const std::vector<PlanEntry>& plan, std::uint64_t e_max,
                                    std::uint64_t m_max) {
    std::vector<Ball> balls;
    std::uint64_t last = cantor_pair(e_max, m_max);
    for (std::uint64_t z = 0; z <= last; ++z) {
        auto [e, m] = cantor_unpair(z);
        if (e > e_max || m > m_max) continue;
        if (m == 0) balls.push_back(Ball::from_interval(block_gap(e)));
        if (const auto* p = detail::find_entry(plan, e, m))
            for (const auto& o : p->leftover) balls.push_back(Ball::from_interval(o));
    }
    return ClosedSetCode{BallStream(std::move(balls))};
}

/// The original cover carried onto I_{e,m} (0 to its left end, 1 to its
/// right end) and cut down to the helper interval (c, d).
inline CoverStream local_cover(const CoverStream& clamped_cover, const PlanEntry& p) {
    Rational lo = p.interval.lo;
    Rational len = p.interval.length();
    Interval helper = p.helper;
    return CoverStream{clamped_cover.intervals.filter_map([=](const Interval& i) -> std::optional<Interval> {
                           Interval img = Interval::open(lo + i.lo * len, lo + i.hi * len);
                           return intersect(img, helper);
                       }),
                       clamped_cover.claim};
}

struct PlanViolation {
    std::string item;  // "i" .. "v", "helper", "k-rule", "inv1", "inv2"
    std::uint64_t e = 0, m = 0;
    std::string detail;
};

struct PlanCheckOptions {
    std::size_t local_prefix = 64;      // local-cover prefix used for (iv) and (v)
    std::size_t coverage_budget = 512;  // search depth for the rational-coverage samples in (iv)
    std::size_t coverage_samples = 8;   // t = j / samples, mapped into I_{e,m}
};

/// Exact checks of the pre-domain properties for every entry of `plan`.
///
/// `clamped_cover` must be the cover the plan was built from. An empty
/// report means every check passed.
inline std::vector<PlanViolation> verify_plan_invariants(const std::vector<PlanEntry>& plan,
                                                         const CoverStream& clamped_cover,
                                                         const PlanCheckOptions& opt = {}) {
    std::vector<PlanViolation> out;
    auto report = [&](std::string item, const PlanEntry& p, std::string detail) {
        out.push_back({std::move(item), p.e, p.m, std::move(detail)});
    };

    std::map<std::uint64_t, std::vector<const PlanEntry*>> by_block;
    for (const auto& p : plan) by_block[p.e].push_back(&p);
    for (auto& [e, list] : by_block)
        std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->m < b->m; });

    // Per-entry geometry: (ii), (iii), helper placement.
    for (const auto& p : plan) {
        Interval ie = base_interval(p.e);
        if (!p.interval.is_closed() || !p.helper.is_open())
            report("iii", p, "I must be closed and (c,d) open");
        if (!p.interval.contains(p.point))
            report("ii", p, "q = " + p.point.str() + " not in I = " + p.interval.str());
        else if (!Interval::open(p.interval.lo, p.interval.hi).contains(p.point))
            report("ii", p, "q = " + p.point.str() + " not interior to I = " + p.interval.str());
        if (!is_subset(p.interval, ie))
            report("iii", p, "I = " + p.interval.str() + " not inside I_e = " + ie.str());
        if (p.interval.length() > Rational::pow2(-static_cast<long>(p.m + 1)))
            report("iii", p, "|I| = " + p.interval.length().str() + " exceeds 2^-" + std::to_string(p.m + 1));
        if (!is_subset(p.interval, p.helper))
            report("iii", p, "I = " + p.interval.str() + " not inside (c,d) = " + p.helper.str());
        if (!is_subset(p.helper, ie))
            report("helper", p, "(c,d) = " + p.helper.str() + " not inside I_e = " + ie.str());
    }

    // Pairwise disjointness of all chosen intervals.
    for (std::size_t a = 0; a < plan.size(); ++a)
        for (std::size_t b = a + 1; b < plan.size(); ++b)
            if (intersects(plan[a].interval, plan[b].interval))
                report("disjoint", plan[a],
                       "meets I_{" + std::to_string(plan[b].e) + "," + std::to_string(plan[b].m) + "}");

    // Stage invariants, the k rule and helper placement, block by block.
    for (const auto& [e, list] : by_block) {
        CoverStream cov_e = transfer_to_block(clamped_cover, e);
        IntervalSet uncovered = normalize({base_interval(e)}, Kind::Closed);
        IntervalSet covered(Kind::Open);
        IntervalSet chosen(Kind::Closed);
        IntervalSet leftovers(Kind::Open);
        std::optional<std::uint64_t> prev_k;
        std::vector<Interval> helpers;
        std::uint64_t expect_m = 0;
        for (const PlanEntry* p : list) {
            if (p->m != expect_m) {
                report("k-rule", *p, "block entries must start at m=0 without gaps");
                break;
            }
            ++expect_m;
            if (prev_k && p->k <= *prev_k) report("k-rule", *p, "k not increasing");
            std::uint64_t first = prev_k ? *prev_k + 1 : 0;

            const Interval* target = nullptr;
            for (const auto& c : uncovered)
                if (!c.degenerate()) {
                    target = &c;
                    break;
                }
            std::vector<Interval> swept;
            for (std::uint64_t k = first; k <= p->k; ++k) {
                auto iv = cov_e.intervals.at(k);
                if (!iv) continue;
                swept.push_back(*iv);
                bool meets = target && intersect(*iv, Interval::open(target->lo, target->hi)).has_value();
                if (k < p->k && meets)
                    report("k-rule", *p, "earlier k=" + std::to_string(k) + " already meets " + target->str());
                if (k == p->k && !meets) report("k-rule", *p, "k does not meet the leftmost open component");
                if (k == p->k && !is_subset(p->helper, *iv))
                    report("helper", *p, "(c,d) = " + p->helper.str() + " not inside cover interval " + iv->str());
            }
            if (!is_subset(normalize({p->helper}, Kind::Open), uncovered))
                report("helper", *p, "(c,d) = " + p->helper.str() + " meets an earlier cover interval");
            for (const auto& h : helpers)
                if (intersects(h, p->helper)) report("helper", *p, "(c,d) meets earlier helper " + h.str());
            helpers.push_back(p->helper);

            IntervalSet removed = normalize(swept, Kind::Open);
            uncovered = subtract(uncovered, removed);
            covered = unite(covered, removed);
            chosen = unite(chosen, normalize({p->interval}, Kind::Closed));
            leftovers = unite(leftovers, p->leftover);
            prev_k = p->k;

            if (!is_subset(chosen, covered))
                report("inv1", *p, "union of I_{e,n} not inside the cover intervals k <= k_{e,m}");
            IntervalSet expect = subtract_closed(covered, chosen);
            if (!(expect == leftovers))
                report("inv2", *p, "covered minus chosen = " + expect.str() + " but U union = " + leftovers.str());
        }
    }

    // (i): no complement ball of the pre-domain meets a chosen interval.
    if (!plan.empty()) {
        std::uint64_t e_max = 0, m_max = 0;
        for (const auto& p : plan) {
            e_max = std::max(e_max, p.e);
            m_max = std::max(m_max, p.m);
        }
        ClosedSetCode d = predomain_code(plan, e_max, m_max);
        auto balls = d.complement.prefix(*d.complement.length());
        for (const auto& p : plan) {
            std::set<std::string> seen;  // balls repeat across m
            for (const auto& b : balls)
                if (intersects(b.as_interval(), p.interval) && seen.insert(b.as_interval().str()).second)
                    report("i", p, "complement ball " + b.as_interval().str() + " meets I = " + p.interval.str());
        }
    }

    // (iv) and (v) through the local covers.
    std::vector<std::vector<Interval>> locals;
    for (const auto& p : plan) locals.push_back(local_cover(clamped_cover, p).intervals.prefix(opt.local_prefix));
    for (std::size_t a = 0; a < plan.size(); ++a) {
        const auto& p = plan[a];
        for (const auto& iv : locals[a])
            if (!is_subset(iv, p.helper)) report("v", p, "local interval " + iv.str() + " leaves (c,d)");
        if (!no_finite_subcover_witness(p.interval, locals[a]))
            report("iv", p, "first " + std::to_string(opt.local_prefix) + " local intervals cover I");
        if (clamped_cover.claim == CoverClaim::CoversAllRationals && opt.coverage_samples > 0) {
            auto lc = local_cover(clamped_cover, p);
            for (std::size_t j = 0; j <= opt.coverage_samples; ++j) {
                Rational x = p.interval.lo +
                             p.interval.length() * Rational(static_cast<long>(j), static_cast<long>(opt.coverage_samples));
                bool hit = false;
                for (std::size_t k = 0; k < opt.coverage_budget && !hit; ++k)
                    if (auto iv = lc.intervals.at(k); iv && iv->contains(x)) hit = true;
                if (!hit) report("iv", p, "rational " + x.str() + " not covered within the search budget");
            }
        }
        for (std::size_t b = 0; b < plan.size(); ++b) {
            if (a == b) continue;
            for (const auto& iv : locals[b])
                if (intersects(iv, p.interval)) {
                    report("v", p, "meets local interval " + iv.str() + " of (" + std::to_string(plan[b].e) +
                                       "," + std::to_string(plan[b].m) + ")");
                    break;
                }
        }
    }
    return out;
}

}  // namespace rmtw
