#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rmtw/construction.hpp"
#include "rmtw/diag.hpp"
#include "rmtw/errors.hpp"
#include "rmtw/reversal.hpp"
#include "rmtw/wkl.hpp"

namespace rmtw::io {

namespace detail {

/// Whitespace-separated tokens of every non-blank line, '#' starting a comment.
inline std::vector<std::vector<std::string>> token_lines(std::istream& in) {
    std::vector<std::vector<std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (!toks.empty()) out.push_back(std::move(toks));
    }
    return out;
}

inline std::uint64_t parse_nat(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw Error(ErrorKind::Parse, "expected a natural number, got '" + s + "'");
    return std::stoull(s);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace detail

/// Lines "g0 m v" or "g1 m v". Validated.
inline SeparationInstance parse_instance(std::istream& in) {
    SeparationInstance inst;
    for (const auto& t : detail::token_lines(in)) {
        if (t.size() != 3 || (t[0] != "g0" && t[0] != "g1"))
            throw Error(ErrorKind::Parse, "instance line must be 'g0 m v' or 'g1 m v'");
        auto& g = t[0] == "g0" ? inst.g0 : inst.g1;
        std::uint64_t m = detail::parse_nat(t[1]);
        if (!g.emplace(m, detail::parse_nat(t[2])).second)
            throw Error(ErrorKind::Parse, t[0] + "(" + t[1] + ") given twice");
    }
    inst.validate();
    return inst;
}

inline std::string format_instance(const SeparationInstance& inst) {
    std::string s;
    for (const auto& [m, v] : inst.g0) s += "g0 " + std::to_string(m) + " " + std::to_string(v) + "\n";
    for (const auto& [m, v] : inst.g1) s += "g1 " + std::to_string(m) + " " + std::to_string(v) + "\n";
    return s;
}

/// Lines "a b": the open interval (a, b). The claim is left Unknown.
inline CoverStream parse_cover(std::istream& in) {
    std::vector<Interval> ivs;
    for (const auto& t : detail::token_lines(in)) {
        if (t.size() != 2) throw Error(ErrorKind::Parse, "cover line must be 'a b'");
        Rational a = Rational::parse(t[0]), b = Rational::parse(t[1]);
        if (!(a < b)) throw Error(ErrorKind::Parse, "cover interval needs a < b: " + t[0] + " " + t[1]);
        ivs.push_back(Interval::open(a, b));
    }
    return CoverStream{Stream<Interval>(std::move(ivs)), CoverClaim::Unknown};
}

/// Lines "e s c0 c1 ...": index e halts at stage s with polynomial c0 + c1 x + ...
inline PolyOracle parse_oracle(std::istream& in) {
    PolyOracle o;
    for (const auto& t : detail::token_lines(in)) {
        if (t.size() < 2) throw Error(ErrorKind::Parse, "oracle line must be 'e s c0 c1 ...'");
        Polynomial p;
        for (std::size_t i = 2; i < t.size(); ++i) p.coeffs.push_back(Rational::parse(t[i]));
        std::uint64_t e = detail::parse_nat(t[0]);
        if (o.halt(e)) throw Error(ErrorKind::Parse, "index " + t[0] + " given twice");
        o.set(e, detail::parse_nat(t[1]), std::move(p));
    }
    return o;
}

/// Lines "x y": knots of a piecewise-linear function.
inline PLFunction parse_pl(std::istream& in) {
    std::vector<PLFunction::Knot> knots;
    for (const auto& t : detail::token_lines(in)) {
        if (t.size() != 2) throw Error(ErrorKind::Parse, "knot line must be 'x y'");
        knots.emplace_back(Rational::parse(t[0]), Rational::parse(t[1]));
    }
    return PLFunction(std::move(knots));
}

/// "e m [I] q (c,d) k U1 U2 ..."
inline std::string format_plan_entry(const PlanEntry& p) {
    std::string s = std::to_string(p.e) + " " + std::to_string(p.m) + " " + p.interval.str() + " " +
                    p.point.str() + " " + p.helper.str() + " " + std::to_string(p.k);
    for (const auto& u : p.leftover) s += " " + u.str();
    return s;
}

inline std::vector<PlanEntry> parse_plan(std::istream& in) {
    std::vector<PlanEntry> out;
    for (const auto& t : detail::token_lines(in)) {
        if (t.size() < 6) throw Error(ErrorKind::Parse, "plan line must be 'e m [I] q (c,d) k U...'");
        PlanEntry p;
        p.e = detail::parse_nat(t[0]);
        p.m = detail::parse_nat(t[1]);
        p.interval = Interval::parse(t[2]);
        p.point = Rational::parse(t[3]);
        p.helper = Interval::parse(t[4]);
        p.k = detail::parse_nat(t[5]);
        std::vector<Interval> us;
        for (std::size_t i = 6; i < t.size(); ++i) us.push_back(Interval::parse(t[i]));
        p.leftover = normalize(std::move(us), Kind::Open);
        out.push_back(std::move(p));
    }
    return out;
}

inline std::string format_generator(const Generator& g) {
    return g.a.str() + " " + g.r.str() + " " + g.b.str() + " " + g.s.str();
}

inline nlohmann::json to_json(const SeparationReport& r) {
    using nlohmann::json;
    json inst = json::object();
    json g0 = json::array(), g1 = json::array();
    for (const auto& [m, v] : r.instance.g0) g0.push_back({m, v});
    for (const auto& [m, v] : r.instance.g1) g1.push_back({m, v});
    inst["g0"] = g0;
    inst["g1"] = g1;

    json budgets = {{"e_max", r.e_max},
                    {"m_max", r.budgets.m_max},
                    {"stage_budget", r.budgets.stage_budget},
                    {"eval_budget", r.budgets.eval_budget},
                    {"verify_m", r.budgets.verify_m},
                    {"modulus_n", r.budgets.modulus_n},
                    {"random_doubles", r.budgets.random_doubles},
                    {"seed", r.budgets.seed}};

    json x = json::object();
    for (const auto& [e, in] : r.x) x[std::to_string(e)] = in;

    json doubles = json::array();
    for (const auto& d : r.doubles) {
        json traces = json::array();
        for (const auto& t : d.traces)
            traces.push_back({{"e", t.e}, {"m", t.m}, {"q", t.point.str()}, {"approx", t.approx.str()},
                              {"member", t.member}});
        doubles.push_back(
            {{"label", d.label}, {"depth", d.depth}, {"lipschitz", d.lipschitz.str()}, {"traces", traces}});
    }

    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});

    return {{"instance", inst},       {"budgets", budgets}, {"X", x},
            {"doubles", doubles},     {"checks", checks},   {"errors", r.errors},
            {"exit_code", r.exit_code()}};
}

/// Writes via a temporary file and rename so readers never see a partial report.
inline void write_atomically(const std::string& path, const std::string& text) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::Io, "cannot write " + tmp);
        f << text;
        if (!f) throw Error(ErrorKind::Io, "write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(ErrorKind::Io, "cannot rename onto " + path);
}

}  // namespace rmtw::io
