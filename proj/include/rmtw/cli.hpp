#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rmtw/construction.hpp"
#include "rmtw/diag.hpp"
#include "rmtw/errors.hpp"
#include "rmtw/io.hpp"
#include "rmtw/reversal.hpp"
#include "rmtw/wkl.hpp"

namespace rmtw::cli {

struct RunConfig {
    std::string command;
    std::string instance_path;
    std::string cover_source = "specker";
    std::optional<std::uint64_t> e_max;
    std::uint64_t m_max = 48;
    std::size_t stage_budget = 4096;
    std::size_t eval_budget = 100000;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string dump_what = "plan";
    std::string plan_path;
    std::string oracle_path;
    std::string fault;
    std::size_t depth = 8;
    std::size_t prefix = 16;
    std::size_t doubles = 0;
    std::optional<std::size_t> stage;
};

inline SeparationInstance load_instance(const std::string& path) {
    std::istringstream in(io::detail::read_file(path));
    return io::parse_instance(in);
}

/// specker | specker:c | tree | file:path. The tree source needs the instance.
inline CoverStream resolve_cover(const RunConfig& cfg, const std::optional<SeparationInstance>& inst) {
    const std::string& src = cfg.cover_source;
    if (src == "specker") return specker_cover();
    if (src.rfind("specker:", 0) == 0) {
        std::string c = src.substr(8);
        return specker_cover(static_cast<unsigned>(io::detail::parse_nat(c)));
    }
    if (src == "tree") {
        if (!inst) throw Error(ErrorKind::Parse, "--cover tree needs --instance");
        return tree_to_cover(kleene_tree(*inst), cfg.depth);
    }
    if (src.rfind("file:", 0) == 0) {
        std::istringstream in(io::detail::read_file(src.substr(5)));
        return io::parse_cover(in);
    }
    throw Error(ErrorKind::Parse, "unknown cover source '" + src + "'");
}

inline std::uint64_t resolve_seed(const RunConfig& cfg) {
    if (cfg.seed) return *cfg.seed;
    if (const char* env = std::getenv("RMTW_SEED")) return io::detail::parse_nat(env);
    return 0;
}

inline std::string format_set(const std::set<std::uint64_t>& s) {
    std::string out = "{";
    for (auto v : s) out += (out.size() > 1 ? "," : "") + std::to_string(v);
    return out + "}";
}

inline int cmd_run(const RunConfig& cfg, std::ostream& out) {
    SeparationInstance inst = load_instance(cfg.instance_path);
    CoverStream cover = resolve_cover(cfg, inst);
    RunBudgets b;
    b.e_max = cfg.e_max;
    b.m_max = cfg.m_max;
    b.stage_budget = cfg.stage_budget;
    b.eval_budget = cfg.eval_budget;
    b.random_doubles = cfg.doubles;
    b.seed = resolve_seed(cfg);
    DoubleFactory primary = pl_extension_double;
    if (cfg.fault == "zero-double") primary = [](const PieceTable&) { return PLFunction::constant(Rational(0)); };
    else if (!cfg.fault.empty()) throw Error(ErrorKind::Parse, "run supports --inject-fault zero-double only");

    SeparationReport rep = run_reversal(inst, cover, b, nullptr, primary);
    out << "X = " << format_set(rep.members()) << "\n";
    for (const auto& c : rep.checks)
        out << (c.ok ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    for (const auto& e : rep.errors) out << "error " << e << "\n";
    if (!cfg.out_path.empty()) io::write_atomically(cfg.out_path, io::to_json(rep).dump(2) + "\n");
    return rep.exit_code();
}

/// Plan invariants, either of a plan dump (--plan) or of a fresh plan for
/// e <= e_max, m <= m_max; with --instance also the f suites.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    std::optional<SeparationInstance> inst;
    if (!cfg.instance_path.empty()) inst = load_instance(cfg.instance_path);
    CoverStream clamped = clamp_cover(resolve_cover(cfg, inst));
    std::vector<PlanEntry> entries;
    Plan plan(clamped, cfg.stage_budget, cfg.m_max);
    if (!cfg.plan_path.empty()) {
        std::istringstream in(io::detail::read_file(cfg.plan_path));
        entries = io::parse_plan(in);
    } else {
        std::uint64_t e_max = cfg.e_max.value_or(0);
        entries = plan.entries(e_max, std::min<std::uint64_t>(cfg.m_max, cfg.depth));
    }
    if (cfg.fault == "widen-plan" && !entries.empty()) {
        PlanEntry& p = entries.front();
        p.interval = Interval::closed(p.interval.lo, p.helper.hi + p.interval.length());
    } else if (!cfg.fault.empty() && cfg.fault != "widen-plan") {
        throw Error(ErrorKind::Parse, "verify supports --inject-fault widen-plan only");
    }

    int code = 0;
    auto viol = verify_plan_invariants(entries, clamped);
    out << "plan entries: " << entries.size() << ", violations: " << viol.size() << "\n";
    for (const auto& v : viol)
        out << "FAIL item " << v.item << " at (" << v.e << "," << v.m << "): " << v.detail << "\n";
    if (!viol.empty()) code = 1;

    if (inst && cfg.plan_path.empty()) {
        std::size_t stage = cfg.stage.value_or(0);
        for (const auto& [m, v] : inst->g0) stage = std::max<std::size_t>(stage, m);
        for (const auto& [m, v] : inst->g1) stage = std::max<std::size_t>(stage, m);
        FBuild fb = f_build(plan, *inst, stage, std::min<std::uint64_t>(cfg.m_max, cfg.depth));
        auto mod = modulus_check_exact(fb.pieces, modulus_h(), 10);
        out << (mod.ok ? "ok   " : "FAIL ") << "modulus h(n)=2n+2, n <= 10" << (mod.ok ? "" : ": " + mod.diagnostic)
            << "\n";
        auto cons = check_consistency(fb.code, 499);
        out << (cons.empty() ? "ok   " : "FAIL ") << "f-code consistency, 500 generators";
        if (!cons.empty())
            out << ": generators " << cons[0].first << "," << cons[0].second << ": " << cons[0].detail;
        out << "\n";
        if (!mod.ok || !cons.empty()) code = 1;
    }
    return code;
}

inline int cmd_dump(const RunConfig& cfg, std::ostream& out) {
    std::optional<SeparationInstance> inst;
    if (!cfg.instance_path.empty()) inst = load_instance(cfg.instance_path);
    const std::string& what = cfg.dump_what;
    if (what == "tree") {
        if (!inst) throw Error(ErrorKind::Parse, "dump tree needs --instance");
        for (const auto& s : kleene_tree(*inst).level(cfg.depth)) out << s << "\n";
        return 0;
    }
    CoverStream cover = resolve_cover(cfg, inst);
    if (what == "cover") {
        for (const auto& i : cover.intervals.prefix(cfg.prefix)) out << i.lo << " " << i.hi << "\n";
        return 0;
    }
    Plan plan(clamp_cover(cover), cfg.stage_budget, cfg.m_max);
    std::uint64_t e_max = cfg.e_max.value_or(0);
    std::uint64_t m_top = std::min<std::uint64_t>(cfg.m_max, cfg.depth);
    if (what == "plan") {
        for (const auto& p : plan.entries(e_max, m_top)) out << io::format_plan_entry(p) << "\n";
        return 0;
    }
    if (!inst) throw Error(ErrorKind::Parse, "dump " + what + " needs --instance");
    std::size_t stage = cfg.stage.value_or(0);
    if (!cfg.stage) {
        for (const auto& [m, v] : inst->g0) stage = std::max<std::size_t>(stage, m);
        for (const auto& [m, v] : inst->g1) stage = std::max<std::size_t>(stage, m);
    }
    if (what == "fcode") {
        FBuild fb = f_build(plan, *inst, stage, m_top);
        for (const auto& g : fb.code.generators.prefix(cfg.prefix)) out << io::format_generator(g) << "\n";
        return 0;
    }
    if (what == "csnap") {
        for (const auto& c : c_structured(plan, *inst, stage, e_max, m_top))
            out << c.e << " " << c.m << " " << c.support << "\n";
        return 0;
    }
    throw Error(ErrorKind::Parse, "unknown dump target '" + what + "'");
}

inline int cmd_diag(const RunConfig& cfg, std::ostream& out) {
    if (cfg.oracle_path.empty()) throw Error(ErrorKind::Parse, "diag needs --oracle");
    std::istringstream in(io::detail::read_file(cfg.oracle_path));
    PolyOracle oracle = io::parse_oracle(in);
    std::uint64_t e_max = cfg.e_max.value_or(0);
    if (!cfg.e_max)
        for (const auto& [e, h] : oracle.entries()) e_max = std::max(e_max, e);
    if (!cfg.fault.empty() && cfg.fault != "flip-sign")
        throw Error(ErrorKind::Parse, "diag supports --inject-fault flip-sign only");
    auto outcomes = diag_run_all(oracle, clamp_cover(resolve_cover(cfg, std::nullopt)), e_max, cfg.stage_budget);
    int code = 0;
    for (auto& o : outcomes) {
        if (cfg.fault == "flip-sign" && o.halted) o.value = -o.value;
        if (!o.halted) {
            out << "e=" << o.e << " erased\n";
            continue;
        }
        out << "e=" << o.e << " s=" << o.stage << " q=" << o.witness << " value=" << o.value
            << " remaining=" << o.remaining << "\n";
        DiagCheck c = diag_verify(o, oracle);
        out << (c.ok ? "ok   " : "FAIL ") << c.detail << "\n";
        if (!c.ok) code = 1;
    }
    return code;
}

/// Parses args (without the program name) and runs the subcommand.
/// Exit codes: 0 all checks pass, 1 invariant violation, 2 budget, contract or usage error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Separation pipeline, pre-domain planner and diagonalizer over exact rationals"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--instance", cfg.instance_path, "instance file (lines 'g0 m v' / 'g1 m v')");
        sub->add_option("--cover", cfg.cover_source, "specker[:c] | tree | file:path");
        sub->add_option("--e-max", cfg.e_max, "largest block index");
        sub->add_option("--m-max", cfg.m_max, "plan depth cap");
        sub->add_option("--stage-budget", cfg.stage_budget, "cover positions scanned per step");
        sub->add_option("--eval-budget", cfg.eval_budget, "generators scanned per evaluation");
        sub->add_option("--seed", cfg.seed, "seed for randomized doubles (falls back to RMTW_SEED)");
        sub->add_option("--out", cfg.out_path, "report file");
        sub->add_option("--depth", cfg.depth, "tree depth / dumped plan depth");
        sub->add_option("--inject-fault", cfg.fault, "zero-double | widen-plan | flip-sign");
    };
    auto* run = app.add_subcommand("run", "decode a separating set and check every suite");
    common(run);
    run->add_option("--doubles", cfg.doubles, "extra randomized extension doubles");
    auto* verify = app.add_subcommand("verify", "check plan invariants and the f suites");
    common(verify);
    verify->add_option("--plan", cfg.plan_path, "plan dump to verify instead of a fresh plan");
    verify->add_option("--stage", cfg.stage, "instance stage for the f suites");
    auto* dump = app.add_subcommand("dump", "print plan, cover, tree, fcode or csnap");
    common(dump);
    dump->add_option("--dump-what", cfg.dump_what, "plan | cover | tree | fcode | csnap");
    dump->add_option("--prefix", cfg.prefix, "items printed for cover and fcode");
    dump->add_option("--stage", cfg.stage, "instance stage (defaults to the last observed)");
    auto* diag = app.add_subcommand("diag", "diagonalize against a polynomial oracle");
    common(diag);
    diag->add_option("--oracle", cfg.oracle_path, "oracle file (lines 'e s c0 c1 ...')");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (*run) {
            if (cfg.instance_path.empty()) throw Error(ErrorKind::Parse, "run needs --instance");
            return cmd_run(cfg, out);
        }
        if (*verify) return cmd_verify(cfg, out);
        if (*dump) return cmd_dump(cfg, out);
        return cmd_diag(cfg, out);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    }
}

}  // namespace rmtw::cli
