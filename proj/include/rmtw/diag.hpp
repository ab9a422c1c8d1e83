#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmtw/construction.hpp"
#include "rmtw/errors.hpp"
#include "rmtw/funcs.hpp"
#include "rmtw/interval.hpp"
#include "rmtw/rational.hpp"
#include "rmtw/wkl.hpp"

namespace rmtw {

/// Abstract polynomial oracle: index e either never halts or halts from
/// stage s on with a fixed polynomial, so answers are monotone by design.
class PolyOracle {
public:
    struct Halt {
        std::uint64_t stage;
        Polynomial p;
    };

    void set(std::uint64_t e, std::uint64_t stage, Polynomial p) { halts_[e] = Halt{stage, std::move(p)}; }

    /// The polynomial if e has halted by stage s.
    std::optional<Polynomial> answer(std::uint64_t e, std::uint64_t s) const {
        auto it = halts_.find(e);
        if (it == halts_.end() || it->second.stage > s) return std::nullopt;
        return it->second.p;
    }

    std::optional<Halt> halt(std::uint64_t e) const {
        auto it = halts_.find(e);
        if (it == halts_.end()) return std::nullopt;
        return it->second;
    }

    const std::map<std::uint64_t, Halt>& entries() const { return halts_; }

private:
    std::map<std::uint64_t, Halt> halts_;
};

/// Result for one index e. `halted` false means I_e was erased (no halt
/// within budget); the remaining fields are then meaningless.
struct DiagOutcome {
    std::uint64_t e = 0;
    bool halted = false;
    std::uint64_t stage = 0;
    IntervalSet remaining{Kind::Closed};
    Rational witness;
    Rational value;
};

/// Runs the diagonalization for e against the cover already transferred to I_e.
inline DiagOutcome diag_run(std::uint64_t e, const PolyOracle& oracle, const CoverStream& cover_e,
                            std::uint64_t budget) {
    DiagOutcome out;
    out.e = e;
    for (std::uint64_t s = 0; s <= budget; ++s) {
        auto p = oracle.answer(e, s);
        if (!p) continue;
        Interval base = base_interval(e);
        IntervalSet opens = normalize(cover_e.intervals.prefix(s), Kind::Open);
        auto q = uncovered_point(base, opens);
        if (!q)
            throw Error(ErrorKind::CoverContractViolation,
                        "first " + std::to_string(s) + " intervals cover " + base.str());
        out.halted = true;
        out.stage = s;
        out.remaining = subtract(base, opens);
        out.witness = *q;
        Rational mag = Rational::pow2(-static_cast<long>(2 * e));
        out.value = (*p)(*q).sign() <= 0 ? mag : -mag;
        return out;
    }
    return out;
}

/// Runs e = 0..e_max against a clamped cover.
inline std::vector<DiagOutcome> diag_run_all(const PolyOracle& oracle, const CoverStream& clamped,
                                             std::uint64_t e_max, std::uint64_t budget) {
    std::vector<DiagOutcome> out;
    for (std::uint64_t e = 0; e <= e_max; ++e)
        out.push_back(diag_run(e, oracle, transfer_to_block(clamped, e), budget));
    return out;
}

struct DiagCheck {
    bool ok = true;
    std::string detail;
};

/// Exact checks on a halted outcome: witness lies in the remaining set, the
/// sign rule was followed, |value - p(q)| >= 2^-2e, and hence p fails the
/// approximation bound 2^-(2e+1) at q.
inline DiagCheck diag_verify(const DiagOutcome& o, const PolyOracle& oracle) {
    std::string tag = "e=" + std::to_string(o.e) + ": ";
    if (!o.halted) return {true, tag + "erased"};
    auto p = oracle.answer(o.e, o.stage);
    if (!p) return {false, tag + "oracle has not halted by stage " + std::to_string(o.stage)};
    if (!o.remaining.contains(o.witness))
        return {false, tag + "witness " + o.witness.str() + " not in remaining set " + o.remaining.str()};
    Rational pq = (*p)(o.witness);
    Rational mag = Rational::pow2(-static_cast<long>(2 * o.e));
    Rational expect = pq.sign() <= 0 ? mag : -mag;
    if (o.value != expect)
        return {false, tag + "value " + o.value.str() + " at q = " + o.witness.str() + " breaks the sign rule (p(q) = " +
                           pq.str() + ", expected " + expect.str() + ")"};
    Rational diff = (o.value - pq).abs();
    if (diff < mag)
        return {false, tag + "|f(q) - p(q)| = " + diff.str() + " < " + mag.str()};
    PieceTable f;
    f.pieces.push_back({Interval::closed(o.witness, o.witness), o.value, static_cast<int>(o.e)});
    if (weierstrass_check(*p, f, o.witness, 2 * o.e + 1))
        return {false, tag + "p approximates f to within 2^-" + std::to_string(2 * o.e + 1) + " at q"};
    return {true, tag + "|f(q) - p(q)| = " + diff.str() + " >= " + mag.str()};
}

}  // namespace rmtw
