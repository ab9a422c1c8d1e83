#include <gtest/gtest.h>

#include <random>

#include "rmtw/reversal.hpp"

using namespace rmtw;

namespace {

Rational R(const char* s) { return Rational::parse(s); }

SeparationInstance toy() {
    SeparationInstance inst;
    inst.g0 = {{0, 0}, {1, 2}};
    inst.g1 = {{0, 1}};
    return inst;
}

CoverStream speck() { return clamp_cover(specker_cover(3)); }

SeparationInstance random_instance(std::mt19937_64& rng) {
    std::vector<std::uint64_t> values = {0, 1, 2, 3, 4, 5};
    std::shuffle(values.begin(), values.end(), rng);
    SeparationInstance inst;
    std::size_t hits = 1 + rng() % 4, used = 0;
    for (std::size_t i = 0; i < hits; ++i) {
        std::uint64_t stage = rng() % 6;
        auto& g = rng() % 2 ? inst.g0 : inst.g1;
        if (g.count(stage)) continue;
        g[stage] = values[used++];
    }
    return inst;
}

}  // namespace

TEST(Guard, Exactness) {
    auto inst = toy();
    // Block 2 is hit at stage 1, block 1 at stage 0, block 3 never.
    EXPECT_TRUE(complement_guard(inst, 2, 0));
    EXPECT_FALSE(complement_guard(inst, 2, 1));
    EXPECT_FALSE(complement_guard(inst, 2, 7));
    EXPECT_FALSE(complement_guard(inst, 1, 0));
    for (std::uint64_t k = 0; k < 50; ++k) EXPECT_TRUE(complement_guard(inst, 3, k));
}

TEST(ESet, HitBlocksFreezeAtFirstHit) {
    Plan plan(speck(), 4096);
    auto inst = toy();
    // Block 0 is hit at stage 0: only local interval 0 was ever removed.
    for (std::uint64_t m = 0; m <= 3; ++m) {
        auto early = e_snapshot(plan, inst, 0, m, 0);
        EXPECT_EQ(e_snapshot(plan, inst, 0, m, 500), early);
        EXPECT_FALSE(early.empty());
    }
    // Block 3 is never hit, so its snapshot keeps shrinking but never empties.
    auto a = e_snapshot(plan, inst, 3, 1, 5), b = e_snapshot(plan, inst, 3, 1, 100);
    EXPECT_FALSE(b.empty());
    for (const auto& c : b) EXPECT_TRUE(a.contains(c.lo) && a.contains(c.hi));
}

TEST(ESet, ComplementCodeMatchesSnapshots) {
    Plan plan(speck(), 4096);
    auto inst = toy();
    auto code = e_complement(plan, inst, 20, 3, 2);
    auto balls = code.complement.prefix(100000);
    std::vector<Interval> removed;
    for (const auto& b : balls) removed.push_back(b.as_interval());
    IntervalSet opens = normalize(removed, Kind::Open);
    for (std::uint64_t e = 0; e <= 3; ++e)
        for (std::uint64_t m = 0; m <= 2; ++m) {
            const PlanEntry& p = plan.entry(e, m);
            auto snap = e_snapshot(plan, inst, e, m, 20);
            for (int j = 0; j <= 32; ++j) {
                Rational x = p.interval.lo + p.interval.length() * Rational(j, 32);
                EXPECT_EQ(snap.contains(x), !opens.contains(x)) << e << " " << m << " " << x;
            }
        }
}

TEST(CSet, ComponentsDisjointAndDense) {
    Plan plan(speck(), 4096);
    auto inst = toy();
    auto cs = c_structured(plan, inst, 10, 2, 2);
    ASSERT_FALSE(cs.empty());
    auto js = supports(cs);
    auto seq = dense_sequence(js);
    for (const auto& c : cs) EXPECT_TRUE(is_subset(c.support, plan.entry(c.e, c.m).interval));
    // Every endpoint and midpoint of every component is witnessed at 2^-10.
    for (const auto& j : js)
        for (const Rational& x : {j.lo, j.mid(), j.hi})
            EXPECT_TRUE(sep_member_at(seq, RealCode::constant(x), Rational::pow2(-10), 4000).witnessed) << x;
}

TEST(FBuild, SignsPerSide) {
    Plan plan(speck(), 4096);
    auto inst = toy();
    auto fb = f_build(plan, inst, 1, 4);
    ASSERT_TRUE(fb.pieces.anchor);
    std::set<int> blocks;
    for (const auto& p : fb.pieces.pieces) {
        blocks.insert(p.block);
        if (p.block == 0) { EXPECT_EQ(p.value, Rational(1)); }
        if (p.block == 2) { EXPECT_EQ(p.value, R("1/16")); }
        if (p.block == 1) { EXPECT_EQ(p.value, R("-1/4")); }
        EXPECT_TRUE(is_subset(p.support, base_interval(p.block)));
    }
    EXPECT_EQ(blocks, (std::set<int>{0, 1, 2}));
    // At stage 0 block 2 is not hit yet.
    for (const auto& p : f_pieces(plan, inst, 0, 4).pieces) EXPECT_NE(p.block, 2);
    EXPECT_EQ(modulus_h()(3), 8u);
}

TEST(FBuild, ModulusHoldsExactly) {
    Plan plan(speck(), 4096);
    auto fb = f_build(plan, toy(), 1, 6);
    auto mc = modulus_check_exact(fb.pieces, modulus_h(), 8);
    EXPECT_TRUE(mc.ok) << mc.diagnostic;
    // h(n) = n is too weak: some piece sits within 2^-1 of the anchor with value 1.
    EXPECT_FALSE(modulus_check_exact(fb.pieces, Modulus::affine(1, 0), 8).ok);
}

TEST(FBuild, CodeConsistentAndEvaluatesAtPlanPoints) {
    Plan plan(speck(), 4096);
    auto inst = toy();
    auto fb = f_build(plan, inst, 1, 6, 24);
    EXPECT_TRUE(check_consistency(fb.code, 499).empty());
    for (std::uint64_t e : {0u, 1u, 2u})
        for (std::uint64_t m = 0; m <= 6; ++m) {
            const PlanEntry& p = plan.entry(e, m);
            auto v = eval_at(fb.code, RealCode::constant(p.point), Rational::pow2(-static_cast<long>(2 * e + 3)),
                             100000);
            ASSERT_TRUE(v.found) << e << " " << m;
            auto exact = fb.pieces.value_at(p.point);
            ASSERT_TRUE(exact);
            EXPECT_TRUE((v.b - *exact).abs() <= v.s);
        }
    // The anchor pins f(0) = 0.
    auto z = eval_at(fb.code, RealCode::constant(0), R("1/64"), 100000);
    ASSERT_TRUE(z.found);
    EXPECT_TRUE(z.b.is_zero());
}

TEST(Doubles, ExtensionExamples) {
    PieceTable empty;
    PLFunction z = pl_extension_double(empty);
    for (const char* x : {"0", "1/3", "1"}) EXPECT_TRUE(pl_eval(z, R(x)).is_zero());
    PieceTable one;
    one.pieces.push_back({Interval::closed(R("1/2"), 1), R("1/4"), 0});
    PLFunction F = pl_extension_double(one);
    EXPECT_EQ(pl_eval(F, R("1/4")), R("1/8"));
    EXPECT_EQ(pl_eval(F, R("3/4")), R("1/4"));
    EXPECT_EQ(F.lipschitz(), R("1/2"));
    EXPECT_FALSE(extension_mismatch(F, one));
}

TEST(Doubles, RandomizedDoublesAgreeOnPieces) {
    Plan plan(speck(), 4096);
    auto fp = f_pieces(plan, toy(), 1, 6);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        PLFunction F = randomized_double(fp, rng);
        EXPECT_FALSE(extension_mismatch(F, fp)) << *extension_mismatch(F, fp);
    }
}

TEST(Doubles, MismatchDetected) {
    PieceTable one;
    one.anchor = true;
    one.pieces.push_back({Interval::closed(R("1/2"), 1), R("1/4"), 0});
    auto bad = extension_mismatch(PLFunction::constant(0), one);
    ASSERT_TRUE(bad);
    EXPECT_NE(bad->find("1/2"), std::string::npos);
    EXPECT_TRUE(extension_mismatch(PLFunction::constant(1), PieceTable{{}, true}));
}

TEST(Decode, SoundOnToy) {
    Plan plan(speck(), 4096);
    auto inst = toy();
    // Raise the piece depth until the double's modulus asks for no deeper plan entry.
    std::uint64_t depth = 6;
    PieceTable fp = f_pieces(plan, inst, 1, depth);
    PLFunction F = pl_extension_double(fp);
    Modulus H = pl_modulus(F);
    while (H(6) > depth) {
        depth = H(6);
        fp = f_pieces(plan, inst, 1, depth);
        F = pl_extension_double(fp);
        H = pl_modulus(F);
    }
    for (std::uint64_t e = 0; e <= 2; ++e) {
        auto d = decode(F, H, e, plan, 1000);
        EXPECT_EQ(d.m, H(2 * e + 2));
        EXPECT_EQ(d.point, plan.entry(e, d.m).point);
    }
    EXPECT_TRUE(decode(F, H, 0, plan, 1000).member);
    EXPECT_FALSE(decode(F, H, 1, plan, 1000).member);
    EXPECT_TRUE(decode(F, H, 2, plan, 1000).member);
}

TEST(Decode, FuncCodeBudgetExceeded) {
    Plan plan(speck(), 4096);
    FuncCode none{Stream<Generator>(std::vector<Generator>{})};
    try {
        decode(none, modulus_h(), 0, plan, 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EvalBudgetExceeded);
    }
}

TEST(Run, ToySeparates) {
    RunBudgets b;
    auto rep = run_reversal(toy(), specker_cover(3), b);
    ASSERT_TRUE(rep.errors.empty()) << rep.errors[0];
    for (const auto& c : rep.checks) EXPECT_TRUE(c.ok) << c.name << ": " << c.detail;
    EXPECT_EQ(rep.exit_code(), 0);
    EXPECT_EQ(rep.members(), (std::set<std::uint64_t>{0, 2}));
    b.e_max = 3;
    auto wider = run_reversal(toy(), specker_cover(3), b);
    EXPECT_EQ(wider.exit_code(), 0);
    EXPECT_TRUE(wider.members().count(0) && wider.members().count(2));
    EXPECT_FALSE(wider.members().count(1));
}

TEST(Run, EmptyInstance) {
    auto rep = run_reversal(SeparationInstance{}, specker_cover(3), RunBudgets{});
    EXPECT_EQ(rep.exit_code(), 0);
    EXPECT_TRUE(rep.f.pieces.empty());
}

TEST(Run, ZeroDoubleFails) {
    auto rep = run_reversal(toy(), specker_cover(3), RunBudgets{}, nullptr,
                            [](const PieceTable&) { return PLFunction::constant(0); });
    EXPECT_EQ(rep.exit_code(), 1);
    bool ext = false, sep = false;
    for (const auto& c : rep.checks) {
        if (c.name == "extension[primary]" && !c.ok) ext = true;
        if (c.name == "separation[primary]" && !c.ok) {
            sep = true;
            EXPECT_NE(c.detail.find("1"), std::string::npos);
        }
    }
    EXPECT_TRUE(ext);
    EXPECT_TRUE(sep);
}

TEST(Run, DegenerateCoverReportsError) {
    CoverStream whole{Stream<Interval>(std::vector<Interval>{Interval::open(R("-1/5"), R("6/5"))}),
                      CoverClaim::Unknown};
    auto rep = run_reversal(toy(), whole, RunBudgets{});
    EXPECT_EQ(rep.exit_code(), 2);
    ASSERT_FALSE(rep.errors.empty());
}

TEST(Run, RandomInstancesWithRandomDoubles) {
    std::mt19937_64 rng(99);
    Plan plan(speck(), 4096, 48);
    for (int t = 0; t < 12; ++t) {
        auto inst = random_instance(rng);
        RunBudgets b;
        b.random_doubles = 3;
        b.seed = static_cast<std::uint64_t>(t);
        auto rep = run_reversal(inst, plan.cover(), b, &plan);
        ASSERT_TRUE(rep.errors.empty()) << rep.errors[0];
        for (const auto& c : rep.checks) EXPECT_TRUE(c.ok) << c.name << ": " << c.detail;
        for (const auto& d : rep.doubles) {
            for (auto e : inst.range0()) EXPECT_TRUE(d.x.at(e)) << d.label;
            for (auto e : inst.range1()) EXPECT_FALSE(d.x.at(e)) << d.label;
        }
    }
}
