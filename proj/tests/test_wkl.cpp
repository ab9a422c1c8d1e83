#include <gtest/gtest.h>

#include <random>

#include "rmtw/construction.hpp"
#include "rmtw/wkl.hpp"

using namespace rmtw;

namespace {

Rational R(const char* s) { return Rational::parse(s); }

SeparationInstance toy() {
    SeparationInstance inst;
    inst.g0 = {{0, 0}, {1, 2}};
    inst.g1 = {{0, 1}};
    return inst;
}

// Brute-force rule for membership, independent of the tree implementation.
bool rule_allows(const SeparationInstance& inst, const std::string& s) {
    for (std::size_t e = 0; e < s.size(); ++e)
        for (std::size_t j = 0; j < s.size(); ++j) {
            auto a = inst.g0.find(j);
            if (a != inst.g0.end() && a->second == e && s[e] != '1') return false;
            auto b = inst.g1.find(j);
            if (b != inst.g1.end() && b->second == e && s[e] != '0') return false;
        }
    return true;
}

SeparationInstance random_instance(std::mt19937_64& rng) {
    std::vector<std::uint64_t> values = {0, 1, 2, 3, 4, 5, 6};
    std::shuffle(values.begin(), values.end(), rng);
    SeparationInstance inst;
    std::size_t hits = 1 + rng() % 4, used = 0;
    std::vector<std::uint64_t> stages = {0, 1, 2, 3, 4, 5};
    std::shuffle(stages.begin(), stages.end(), rng);
    for (std::size_t i = 0; i < hits; ++i) {
        auto& g = rng() % 2 ? inst.g0 : inst.g1;
        if (g.count(stages[i])) continue;
        g[stages[i]] = values[used++];
    }
    return inst;
}

}  // namespace

TEST(Instance, ValidateRejectsBadInstances) {
    SeparationInstance a;
    a.g0 = {{0, 3}, {1, 3}};
    EXPECT_THROW(a.validate(), Error);
    SeparationInstance b;
    b.g0 = {{0, 3}};
    b.g1 = {{4, 3}};
    try {
        b.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InstanceViolation);
    }
    EXPECT_NO_THROW(toy().validate());
}

TEST(Instance, FirstHit) {
    auto inst = toy();
    auto h = inst.first_hit(2);
    ASSERT_TRUE(h);
    EXPECT_EQ(h->stage, 1u);
    EXPECT_EQ(h->side, SeparationInstance::Side::G0);
    EXPECT_EQ(inst.first_hit(1)->side, SeparationInstance::Side::G1);
    EXPECT_FALSE(inst.first_hit(3));
}

TEST(KleeneTree, Examples) {
    SeparationInstance inst;
    inst.g0 = {{0, 0}};
    inst.g1 = {{0, 1}};
    auto t = kleene_tree(inst);
    EXPECT_EQ(t.level(2), (std::vector<std::string>{"10"}));
    EXPECT_TRUE(t.contains("1"));
    EXPECT_EQ(kleene_tree(SeparationInstance{}).level(3).size(), 8u);
    EXPECT_EQ(kleene_tree(toy()).level(2), (std::vector<std::string>{"10"}));
}

TEST(KleeneTree, SoundnessExhaustive) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t) {
        auto inst = random_instance(rng);
        auto tree = kleene_tree(inst);
        for (std::size_t d = 0; d <= 10; ++d) {
            auto lvl = tree.level(d);
            std::size_t expected = 0;
            for (std::uint64_t bits = 0; bits < (1ULL << d); ++bits) {
                std::string s(d, '0');
                for (std::size_t i = 0; i < d; ++i)
                    if (bits >> (d - 1 - i) & 1) s[i] = '1';
                bool prefix_ok = true;
                for (std::size_t l = 0; l <= d; ++l) prefix_ok = prefix_ok && rule_allows(inst, s.substr(0, l));
                if (prefix_ok) ++expected;
                EXPECT_EQ(tree.contains(s), rule_allows(inst, s));
            }
            EXPECT_EQ(lvl.size(), expected);
            for (const auto& s : lvl)
                for (std::size_t l = 0; l < s.size(); ++l) EXPECT_TRUE(tree.contains(s.substr(0, l)));
        }
    }
}

TEST(Paths, RoundTrip) {
    auto x = path_to_sepset("10");
    EXPECT_TRUE(x.count(0));
    EXPECT_FALSE(x.count(1));
    EXPECT_EQ(sepset_to_path({}, 5), "00000");
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        std::string s(8, '0');
        for (auto& c : s) c = rng() % 2 ? '1' : '0';
        EXPECT_EQ(sepset_to_path(path_to_sepset(s), 8), s);
    }
}

TEST(Specker, IntervalsAndMass) {
    auto cov = specker_cover(3);
    EXPECT_EQ(cov.claim, CoverClaim::CoversAllRationals);
    auto p = cov.intervals.prefix(3);
    EXPECT_EQ(p[0].str(), "(-1/8,1/8)");
    EXPECT_EQ(p[1].str(), "(15/16,17/16)");
    EXPECT_EQ(p[2].str(), "(15/32,17/32)");
    Rational mass(0);
    for (const auto& i : cov.intervals.prefix(200)) mass += i.length();
    EXPECT_TRUE(mass < R("1/2"));
    for (std::uint64_t n = 0; n < 300; ++n) EXPECT_TRUE(cov.intervals.at(n)->contains(unit_rational(n)));
    EXPECT_THROW(specker_cover(2), Error);
}

TEST(Specker, NoFiniteSubcoverOfUpperHalf) {
    auto pre = specker_cover(3).intervals.prefix(20);
    auto w = no_finite_subcover_witness(Interval::closed(R("1/2"), 1), pre);
    ASSERT_TRUE(w);
    for (const auto& i : pre) EXPECT_FALSE(i.contains(*w));
    EXPECT_TRUE(Interval::closed(R("1/2"), 1).contains(*w));
}

TEST(Specker, NoFiniteSubcoverOnEveryBlock) {
    auto clamped = clamp_cover(specker_cover(3));
    for (std::uint64_t e = 0; e <= 4; ++e) {
        auto moved = transfer_to_block(clamped, e);
        Interval ie = base_interval(e);
        std::vector<Interval> pre;
        for (std::size_t n = 0; n <= 200; n += 25) {
            auto w = no_finite_subcover_witness(ie, moved.intervals.prefix(n));
            ASSERT_TRUE(w) << e << " " << n;
            for (const auto& i : moved.intervals.prefix(n)) EXPECT_FALSE(i.contains(*w));
        }
    }
}

TEST(TreeCover, DeadNodeCylinderPadded) {
    BinTree t{[](const std::string& s) { return s.empty() || s[0] == '1'; }};
    auto cov = tree_to_cover(t, 1).intervals.prefix(10);
    // Root gap (1/3, 2/3), then dead child "0" whose cylinder [0, 1/3] is padded by 1/9.
    ASSERT_GE(cov.size(), 2u);
    EXPECT_EQ(cov[0].str(), "(1/3,2/3)");
    EXPECT_EQ(cov[1].str(), "(-1/9,4/9)");
}

TEST(TreeCover, FullTreeLeavesCantorSetUncovered) {
    BinTree full{[](const std::string&) { return true; }};
    auto cov = tree_to_cover(full, 4);
    EXPECT_EQ(cov.claim, CoverClaim::Unknown);
    auto opens = normalize(cov.intervals.prefix(1000));
    for (const auto& s : full.level(4)) EXPECT_FALSE(opens.contains(cantor_point(s))) << s;
}

TEST(TreeCover, FiniteTreeCoversUnitInterval) {
    BinTree t{[](const std::string& s) { return s.size() <= 2; }};
    auto cov = tree_to_cover(t, 5);
    EXPECT_EQ(cov.claim, CoverClaim::CoversAllReals);
    auto opens = normalize(cov.intervals.prefix(1000));
    EXPECT_FALSE(uncovered_point(Interval::closed(0, 1), opens).has_value());
    BinTree empty{[](const std::string&) { return false; }};
    auto all = tree_to_cover(empty, 3);
    EXPECT_EQ(all.claim, CoverClaim::CoversAllReals);
    EXPECT_FALSE(uncovered_point(Interval::closed(0, 1), normalize(all.intervals.prefix(5))).has_value());
}

TEST(TreeCover, LivePathsStayUncovered) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 15; ++t) {
        auto inst = random_instance(rng);
        auto tree = kleene_tree(inst);
        for (std::size_t d = 1; d <= 7; ++d) {
            auto opens = normalize(tree_to_cover(tree, d).intervals.prefix(100000));
            for (const auto& s : tree.level(d)) EXPECT_FALSE(opens.contains(cantor_point(s))) << s;
            // The separating set read off the instance is such a path.
            std::set<std::uint64_t> x = inst.range0();
            std::string path = sepset_to_path(x, d);
            ASSERT_TRUE(tree.contains(path));
            EXPECT_FALSE(opens.contains(cantor_point(path)));
        }
    }
}

TEST(Clamp, Examples) {
    CoverStream c{Stream<Interval>(std::vector<Interval>{Interval::open(-5, 5), Interval::open(R("1/4"), R("1/2")),
                                                         Interval::open(-5, -1)}),
                  CoverClaim::Unknown};
    auto out = clamp_cover(c).intervals.prefix(3);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0], Interval::open(R("-1/4") + Rational::pow2(-10), R("5/4") - Rational::pow2(-10)));
    EXPECT_EQ(out[1], Interval::open(R("1/4"), R("1/2")));
}
