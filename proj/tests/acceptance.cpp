#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "rmtw/rmtw.hpp"

using namespace rmtw;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

Outcome fail(std::string why) { return {false, std::move(why)}; }

SeparationInstance random_instance(std::mt19937_64& rng) {
    std::vector<std::uint64_t> values = {0, 1, 2, 3, 4, 5};
    std::shuffle(values.begin(), values.end(), rng);
    SeparationInstance inst;
    std::size_t hits = 1 + rng() % 4, used = 0;
    for (std::size_t i = 0; i < hits; ++i) {
        std::uint64_t stage = rng() % 8;
        auto& g = rng() % 2 ? inst.g0 : inst.g1;
        if (g.count(stage)) continue;
        g[stage] = values[used++];
    }
    return inst;
}

std::size_t last_stage(const SeparationInstance& inst) { return detail::last_observed_stage(inst); }

CoverStream speck() { return clamp_cover(specker_cover(3)); }

// Plan shared by suites 3, 4 and 6.
Plan& shared_plan() {
    static Plan plan(speck(), 4096, 64);
    return plan;
}

struct SuiteThree {
    std::vector<SeparationInstance> instances;
    std::vector<SeparationReport> reports;
};

SuiteThree& suite_three_data() {
    static SuiteThree data;
    return data;
}

Outcome plan_suite() {
    Plan plan(speck(), 4096);
    auto entries = plan.entries(4, 8);
    auto v = verify_plan_invariants(entries, plan.cover());
    if (!v.empty())
        return fail(std::to_string(v.size()) + " violations, first (" + std::to_string(v[0].e) + "," +
                    std::to_string(v[0].m) + ") item " + v[0].item + ": " + v[0].detail);
    return {true, std::to_string(entries.size()) + " entries, 0 violations"};
}

Outcome modulus_suite() {
    std::mt19937_64 rng(2024);
    bool both = false;
    std::size_t pairs = 0;
    for (int t = 0; t < 50; ++t) {
        auto inst = random_instance(rng);
        Plan plan(speck(), 4096);
        auto fp = f_pieces(plan, inst, last_stage(inst), 8);
        auto mc = modulus_check_exact(fp, modulus_h(), 10);
        if (!mc.ok) return fail("instance " + std::to_string(t) + ": " + mc.diagnostic);
        pairs += mc.trace.size();
        if (mc.count(ModulusCase::SameBlock) > 0 && mc.count(ModulusCase::SmallValues) > 0) both = true;
    }
    if (!both) return fail("no trace shows both the e <= n and e > n cases");
    return {true, "50 instances, " + std::to_string(pairs) + " close pairs inspected, both cases seen"};
}

Outcome separation_suite() {
    auto& data = suite_three_data();
    std::mt19937_64 rng(77);
    std::size_t decoded = 0;
    for (int t = 0; t < 100; ++t) {
        auto inst = random_instance(rng);
        RunBudgets b;
        b.random_doubles = 10;
        b.seed = static_cast<std::uint64_t>(t);
        auto rep = run_reversal(inst, shared_plan().cover(), b, &shared_plan());
        if (!rep.errors.empty()) return fail("instance " + std::to_string(t) + ": " + rep.errors[0]);
        for (const auto& c : rep.checks)
            if (!c.ok) return fail("instance " + std::to_string(t) + " " + c.name + ": " + c.detail);
        for (const auto& d : rep.doubles) {
            for (auto e : inst.range0())
                if (!d.x.at(e)) return fail("instance " + std::to_string(t) + " " + d.label + ": " +
                                            std::to_string(e) + " in range(g0) decoded out");
            for (auto e : inst.range1())
                if (d.x.at(e)) return fail("instance " + std::to_string(t) + " " + d.label + ": " +
                                           std::to_string(e) + " in range(g1) decoded in");
            decoded += inst.range0().size() + inst.range1().size();
        }
        data.instances.push_back(inst);
        data.reports.push_back(std::move(rep));
    }
    return {true, "100 instances x 11 doubles, " + std::to_string(decoded) + " decodes correct"};
}

Outcome dense_suite() {
    auto& data = suite_three_data();
    if (data.reports.empty()) return fail("suite 3 produced no structured sets");
    const Rational near = Rational::pow2(-10), far = Rational::pow2(-6), gap = Rational::pow2(-5);
    std::size_t sets = 0, witnessed = 0, refused = 0;
    for (std::size_t t = 0; t < data.reports.size(); ++t) {
        const auto& rep = data.reports[t];
        std::uint64_t depth = rep.doubles.front().depth;
        auto cs = c_structured(shared_plan(), data.instances[t], last_stage(data.instances[t]), rep.e_max,
                               std::min<std::uint64_t>(depth, 6));
        auto js = supports(cs);
        auto seq = dense_sequence(js);
        std::size_t budget = 16 * (js.size() + 1);
        ++sets;
        std::vector<Rational> pts = {Rational(0)};
        for (const auto& j : js)
            for (int k = 0; k <= 2; ++k) pts.push_back(j.lo + j.length() * Rational(k, 2));
        for (const auto& x : pts) {
            if (!sep_member_at(seq, RealCode::constant(x), near, budget).witnessed)
                return fail("set " + std::to_string(t) + ": point " + x.str() + " of C not witnessed");
            ++witnessed;
        }
        for (int j = 0; j <= 256; ++j) {
            Rational x(j, 256);
            Rational dist = x.abs();
            for (const auto& J : js) {
                Rational d = x < J.lo ? J.lo - x : x > J.hi ? x - J.hi : Rational(0);
                if (d < dist) dist = d;
            }
            if (dist < gap) continue;
            if (sep_member_at(seq, RealCode::constant(x), far, budget / 2).witnessed)
                return fail("set " + std::to_string(t) + ": " + x.str() + " at distance " + dist.str() +
                            " was witnessed");
            ++refused;
        }
    }
    return {true, std::to_string(sets) + " sets, " + std::to_string(witnessed) + " points witnessed, " +
                      std::to_string(refused) + " far points refused"};
}

Outcome diag_suite() {
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<int> coef(-32, 32), deg(0, 4), stage(0, 40);
    std::size_t halted = 0;
    for (int t = 0; t < 50; ++t) {
        PolyOracle o;
        for (std::uint64_t e = 0; e <= 5; ++e) {
            if (rng() % 5 == 0) continue;
            std::vector<Rational> c(deg(rng) + 1);
            for (auto& x : c) x = Rational(coef(rng), 16);
            o.set(e, stage(rng), Polynomial{c});
        }
        for (const auto& out : diag_run_all(o, speck(), 5, 100)) {
            if (out.halted != o.halt(out.e).has_value())
                return fail("oracle " + std::to_string(t) + " e=" + std::to_string(out.e) + ": halting mismatch");
            if (!out.halted) continue;
            Rational pq = o.answer(out.e, out.stage)->operator()(out.witness);
            if ((out.value - pq).abs() < Rational::pow2(-static_cast<long>(2 * out.e)))
                return fail("oracle " + std::to_string(t) + " e=" + std::to_string(out.e) + ": |f(q)-p(q)| too small");
            auto chk = diag_verify(out, o);
            if (!chk.ok) return fail("oracle " + std::to_string(t) + " " + chk.detail);
            ++halted;
        }
    }
    return {true, "50 oracles, " + std::to_string(halted) + " halted indices diagonalized"};
}

Outcome code_suite() {
    auto& data = suite_three_data();
    std::mt19937_64 rng(8);
    std::size_t codes = 0, probes = 0, answered = 0;
    for (std::size_t t = 0; t < data.reports.size() && t < 20; ++t) {
        const auto& rep = data.reports[t];
        FBuild fb = f_build(shared_plan(), data.instances[t], last_stage(data.instances[t]),
                            std::min<std::uint64_t>(rep.doubles.front().depth, 10));
        auto v = check_consistency(fb.code, 499);
        if (!v.empty()) return fail("f-code " + std::to_string(t) + ": " + v[0].detail);
        PLFunction F = pl_extension_double(fb.pieces);
        FuncCode pc = pl_to_code(F, 8);
        auto w = check_consistency(pc, 499);
        if (!w.empty()) return fail("pl code " + std::to_string(t) + ": " + w[0].detail);
        codes += 2;

        std::uniform_int_distribution<int> num(0, 4096);
        Rational q = (F.lipschitz() + 1) * Rational::pow2(-4);
        for (int k = 0; k < 50; ++k) {
            Rational x(num(rng), 4096);
            ++probes;
            auto r = eval_at(pc, RealCode::constant(x), q, 100000);
            if (!r.found) continue;
            ++answered;
            if ((r.b - pl_eval(F, x)).abs() > r.s)
                return fail("eval_at(" + x.str() + ") = " + r.b.str() + " +- " + r.s.str() + " but F = " +
                            pl_eval(F, x).str());
        }
    }
    if (probes < 1000) return fail("only " + std::to_string(probes) + " probes");
    if (answered == 0) return fail("no probe was answered");
    return {true, std::to_string(codes) + " codes consistent, " + std::to_string(probes) + " probes, " +
                      std::to_string(answered) + " answered, all sound"};
}

Outcome subcover_suite() {
    auto clamped = speck();
    std::size_t checked = 0;
    for (std::uint64_t e = 0; e <= 4; ++e) {
        Interval ie = base_interval(e);
        auto moved = transfer_to_block(clamped, e).intervals.prefix(200);
        Rational mass(0);
        for (std::size_t n = 0; n <= moved.size(); ++n) {
            std::vector<Interval> pre(moved.begin(), moved.begin() + static_cast<long>(n));
            auto w = no_finite_subcover_witness(ie, pre);
            if (!w) return fail("e=" + std::to_string(e) + " prefix " + std::to_string(n) + " covers I_e");
            for (const auto& i : pre)
                if (i.contains(*w)) return fail("witness " + w->str() + " lies in " + i.str());
            if (n > 0) mass += moved[n - 1].length();
            if (!(mass < ie.length()))
                return fail("e=" + std::to_string(e) + " prefix mass " + mass.str() + " reaches |I_e|");
            ++checked;
        }
    }
    return {true, std::to_string(checked) + " prefixes, each with an uncovered witness"};
}

Outcome fault_suite() {
    std::string dir = SAMPLES_DIR;
    struct Case {
        std::vector<std::string> args;
        std::string marker;
    };
    std::vector<Case> cases = {
        {{"run", "--instance", dir + "/toy.inst", "--inject-fault", "zero-double"}, "FAIL extension[primary]: F("},
        {{"verify", "--cover", "file:" + dir + "/toy.cov", "--depth", "0", "--inject-fault", "widen-plan"},
         "FAIL item iii at (0,0)"},
        {{"diag", "--oracle", dir + "/oracle.txt", "--inject-fault", "flip-sign"}, "e=0: value"},
    };
    for (const auto& c : cases) {
        std::ostringstream out, err;
        int code = cli::run_cli(c.args, out, err);
        if (code == 0) return fail(c.args[0] + " fault exited 0");
        if (out.str().find(c.marker) == std::string::npos)
            return fail(c.args[0] + " fault lacks diagnostic '" + c.marker + "'");
    }
    return {true, "3 faults, nonzero exits with located diagnostics"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all = {
        {1, "plan invariants", 30, plan_suite},       {2, "modulus", 30, modulus_suite},
        {3, "decoder separation", 120, separation_suite}, {4, "dense sequence", 30, dense_suite},
        {5, "diagonalization", 10, diag_suite},       {6, "function codes", 30, code_suite},
        {7, "no finite subcover", 10, subcover_suite}, {8, "fault injection", 60, fault_suite},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (o.ok && secs > c.limit_s) o = fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_s));
        if (!o.ok) ++failed;
        std::ostringstream time;
        time.precision(2);
        time << std::fixed << secs;
        std::cout << (o.ok ? "PASS" : "FAIL") << " " << c.id << " " << c.name << " (" << time.str() << " s): "
                  << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
