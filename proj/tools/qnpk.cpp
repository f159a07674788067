// qnpk: command-line front end for the QNP toolkit.
//
// Exit codes: 0 success/accepted, 1 validation violations, 2 I/O or syntax
// errors, 3 unsolvable/rejected.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qnpk/direct.hpp"
#include "qnpk/fond2qnp.hpp"
#include "qnpk/io.hpp"
#include "qnpk/model.hpp"
#include "qnpk/qnp2fond.hpp"
#include "qnpk/sieve.hpp"
#include "qnpk/sim.hpp"
#include "qnpk/solver.hpp"

namespace {

using nlohmann::json;
using namespace qnpk;

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kIoError = 2;
constexpr int kRejected = 3;

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() &&
           s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::string default_output(const std::string& in, const std::string& ext) {
    std::string base = in;
    auto dot = base.rfind('.');
    auto slash = base.rfind('/');
    if (dot != std::string::npos &&
        (slash == std::string::npos || dot > slash))
        base = base.substr(0, dot);
    return base + ext;
}

void emit_report(bool as_json, const json& j, const std::string& text) {
    if (as_json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

struct Cli {
    bool as_json = false;

    int run_validate(const std::string& path) {
        std::string text = read_file(path);
        json j;
        try {
            if (has_suffix(path, ".qnp")) {
                Qnp q = parse_qnp(text, path);
                j = {{"ok", true},
                     {"format", "qnp"},
                     {"booleans", q.bools.size()},
                     {"numerics", q.nums.size()},
                     {"actions", q.actions.size()}};
                emit_report(as_json, j, "ok: qnp " + q.name + "\n");
            } else if (has_suffix(path, ".fond")) {
                TaggedFond p = parse_fond(text, path);
                j = {{"ok", true},
                     {"format", "fond"},
                     {"atoms", p.atoms.size()},
                     {"actions", p.actions.size()}};
                emit_report(as_json, j, "ok: fond " + p.name + "\n");
            } else {
                throw std::runtime_error("unknown extension: " + path);
            }
        } catch (const ValidationError& e) {
            json violations = json::array();
            std::string text_out;
            for (const auto& v : e.report) {
                violations.push_back({{"code", v.code}, {"where", v.where}});
                text_out += "violation: " + v.code + " at " + v.where + "\n";
            }
            emit_report(as_json, {{"ok", false}, {"violations", violations}},
                        text_out);
            return kViolations;
        }
        return kOk;
    }

    int run_translate(const std::string& path, const std::string& mode,
                      const TranslateOptions& opts, bool pddl,
                      std::string out) {
        Qnp q = parse_qnp(read_file(path), path);
        if (out.empty()) out = default_output(path, ".fond");

        TaggedFond fond;
        std::string note;
        if (mode == "direct") {
            fond = t_direct(q);
            note = "direct translation only: solutions additionally "
                   "require a termination check\n";
        } else {
            TranslateOptions o = opts;
            if (mode == "full") o.force_full = true;
            FullTranslation t = t_full(q, o);
            fond = std::move(t.fond);
            if (t.layout.degenerate())
                note = "no variable is ever incremented: output equals the "
                       "direct translation\n";
        }
        write_file(out, emit_fond(fond));
        if (pddl) {
            PddlExport px = emit_pddl(fond);
            write_file(default_output(out, "-domain.pddl"), px.domain);
            write_file(default_output(out, "-problem.pddl"), px.problem);
        }
        json j = {{"atoms", fond.atoms.size()},
                  {"actions", fond.actions.size()},
                  {"output", out}};
        if (!note.empty()) j["note"] = note.substr(0, note.size() - 1);
        emit_report(as_json, j,
                    "atoms=" + std::to_string(fond.atoms.size()) +
                        " actions=" + std::to_string(fond.actions.size()) +
                        "\n" + note + "wrote " + out + "\n");
        return kOk;
    }

    int run_reduce(const std::string& path, const std::string& solutions,
                   const std::string& exitg,
                   const std::vector<std::string>& unfair, std::string out) {
        TaggedFond p = parse_fond(read_file(path), path);
        if (out.empty()) out = default_output(path, ".qnp");
        TaggedFond n = normalize_fond(p);

        Reduction r;
        if (solutions == "strong") {
            r = reduce_r_strong(n);
        } else {
            ReduceOptions o;
            o.exitg =
                exitg == "faithful" ? ExitGMode::Faithful : ExitGMode::Repaired;
            for (const auto& u : unfair) {
                auto colon = u.rfind(':');
                if (colon == std::string::npos)
                    throw CLI::ValidationError("--unfair wants action:index");
                o.unfair.emplace_back(u.substr(0, colon),
                                      std::stoi(u.substr(colon + 1)));
            }
            r = reduce_r(n, o);
        }
        write_file(out, emit_qnp(r.qnp));
        json j = {{"booleans", r.qnp.bools.size()},
                  {"numerics", r.qnp.nums.size()},
                  {"actions", r.qnp.actions.size()},
                  {"output", out}};
        emit_report(as_json, j,
                    "booleans=" + std::to_string(r.qnp.bools.size()) +
                        " numerics=" + std::to_string(r.qnp.nums.size()) +
                        " actions=" + std::to_string(r.qnp.actions.size()) +
                        "\nwrote " + out + "\n");
        return kOk;
    }

    int run_solve(const std::string& path, bool strong, std::string out) {
        TaggedFond p = parse_fond(read_file(path), path);
        if (out.empty()) out = default_output(path, ".pol");
        auto pi = strong ? solve_strong(p) : solve_strong_cyclic(p);
        if (!pi) {
            emit_report(as_json, {{"solved", false}}, "unsolvable\n");
            return kRejected;
        }
        write_file(out, emit_policy(*pi, universe_of(p), p.name));
        emit_report(as_json,
                    {{"solved", true},
                     {"rules", pi->rules.size()},
                     {"output", out}},
                    "solved: " + std::to_string(pi->rules.size()) +
                        " rules\nwrote " + out + "\n");
        return kOk;
    }

    int run_solve_qnp(const std::string& path, const std::string& via,
                      const TranslateOptions& opts, std::string out) {
        Qnp q = parse_qnp(read_file(path), path);
        if (out.empty()) out = default_output(path, ".pol");

        if (via == "oracle") {
            auto pi = oracle_solve_qnp(q);
            if (!pi) {
                emit_report(as_json, {{"solved", false}}, "unsolvable\n");
                return kRejected;
            }
            write_file(out, emit_policy(*pi, universe_of(q), q.name));
            emit_report(as_json,
                        {{"solved", true},
                         {"rules", pi->rules.size()},
                         {"output", out}},
                        "solved: " + std::to_string(pi->rules.size()) +
                            " rules\nwrote " + out + "\n");
            return kOk;
        }

        FullTranslation t = t_full(q, opts);
        auto pi_full = solve_strong_cyclic(t.fond);
        if (!pi_full) {
            emit_report(as_json, {{"solved", false}}, "unsolvable\n");
            return kRejected;
        }
        ProjectionResult proj = project_full_policy(q, t, *pi_full);
        if (proj.memoryless_ok) {
            write_file(out,
                       emit_policy(proj.memoryless, universe_of(q), q.name));
            emit_report(as_json,
                        {{"solved", true},
                         {"memoryless", true},
                         {"rules", proj.memoryless.rules.size()},
                         {"output", out}},
                        "solved: " +
                            std::to_string(proj.memoryless.rules.size()) +
                            " rules\nwrote " + out + "\n");
        } else {
            // no memoryless projection: keep the memory atoms in the rules
            write_file(out, emit_policy(*pi_full, universe_of(t.fond),
                                        t.fond.name));
            emit_report(
                as_json,
                {{"solved", true},
                 {"memoryless", false},
                 {"rules", pi_full->rules.size()},
                 {"output", out}},
                "solved with controller memory (no memoryless projection): " +
                    std::to_string(pi_full->rules.size()) + " rules\nwrote " +
                    out + "\n");
        }
        return kOk;
    }

    int run_verify(const std::string& model_path, const std::string& pol_path,
                   bool sieve_trace) {
        std::string pol_text = read_file(pol_path);
        if (has_suffix(model_path, ".fond")) {
            TaggedFond p = parse_fond(read_file(model_path), model_path);
            Policy pi =
                parse_policy(pol_text, universe_of(p), p.name, pol_path);
            VerifyResult r = verify_strong_cyclic(p, pi);
            emit_report(as_json,
                        {{"accepted", r.ok}, {"reason", r.reason}},
                        r.ok ? "accept\n" : "reject: " + r.reason + "\n");
            return r.ok ? kOk : kRejected;
        }

        Qnp q = parse_qnp(read_file(model_path), model_path);
        Policy pi = parse_policy(pol_text, universe_of(q), q.name, pol_path);
        QnpVerifyResult r = verify_qnp_policy(q, pi);
        std::string text = r.ok ? "accept\n" : "reject: " + r.reason + "\n";
        json steps = json::array();
        if (sieve_trace) {
            for (const auto& st : r.sieve.steps) {
                steps.push_back({{"variable", st.var},
                                 {"component", st.component},
                                 {"removed_edges", st.removed_edges.size()}});
                text += "sieve: var=" + st.var + " component-size=" +
                        std::to_string(st.component.size()) + " removed=" +
                        std::to_string(st.removed_edges.size()) + "\n";
            }
            text += std::string("sieve: ") +
                    (r.sieve.terminating ? "terminating" : "non-terminating") +
                    "\n";
        }
        json j = {{"accepted", r.ok}, {"reason", r.reason}};
        if (sieve_trace) {
            j["sieve"] = steps;
            j["terminating"] = r.sieve.terminating;
        }
        emit_report(as_json, j, text);
        return r.ok ? kOk : kRejected;
    }

    int run_simulate(const std::string& model_path,
                     const std::string& pol_path, SimConfig cfg,
                     const std::string& adversary, bool dump_trace) {
        Qnp q = parse_qnp(read_file(model_path), model_path);
        Policy pi = parse_policy(read_file(pol_path), universe_of(q), q.name,
                                 pol_path);
        auto adv = adversary_from_string(adversary);
        if (!adv)
            throw CLI::ValidationError("--adversary wants random|min-step|zero-jump");
        cfg.adversary = *adv;
        cfg.record_trace = dump_trace;

        auto results = simulate(q, pi, cfg);
        int goals = 0, caps = 0, dead = 0;
        for (const auto& r : results) {
            if (r.outcome == RolloutOutcome::Goal) ++goals;
            if (r.outcome == RolloutOutcome::StepCap) ++caps;
            if (r.outcome == RolloutOutcome::DeadEnd) ++dead;
        }
        std::string text = "goal=" + std::to_string(goals) +
                           " step-cap=" + std::to_string(caps) +
                           " dead-end=" + std::to_string(dead) + "\n";
        if (dump_trace) {
            for (std::size_t ri = 0; ri < results.size(); ++ri)
                for (const auto& step : results[ri].trace) {
                    text += std::to_string(ri) + "\t" +
                            (step.action.empty() ? "-" : step.action);
                    for (bool b : step.state.bools)
                        text += b ? "\t1" : "\t0";
                    for (double v : step.state.nums)
                        text += "\t" + std::to_string(v);
                    text += "\n";
                }
        }
        json j = {{"goal", goals}, {"step_cap", caps}, {"dead_end", dead}};
        emit_report(as_json, j, text);
        return dead == 0 && caps == 0 ? kOk : kRejected;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qualitative numerical planning toolkit"};
    app.require_subcommand(1);
    Cli cli;
    app.add_flag("--json", cli.as_json, "machine-readable output");

    std::string in_path, out_path, pol_path;
    std::string mode = "auto", via = "full", solutions = "strong-cyclic";
    std::string exitg = "repaired", adversary = "random";
    std::vector<std::string> unfair;
    TranslateOptions topts;
    long long max_override = 0;
    bool pddl = false, strong = false, sieve_trace = false,
         dump_trace = false;
    SimConfig cfg;
    long long seed = 0;

    auto add_translate_flags = [&](CLI::App* c) {
        c->add_option("--max", max_override, "counter bound override");
        c->add_flag("--well-ordered", topts.well_ordered,
                    "extend the direct-variable analysis");
        c->add_flag("--force-full", topts.force_full,
                    "stack every numeric variable");
    };

    auto* v = app.add_subcommand("validate", "parse and validate a model");
    v->add_option("path", in_path)->required();

    auto* tr = app.add_subcommand("translate", "QNP to FOND");
    tr->add_option("path", in_path)->required();
    tr->add_option("-o,--output", out_path);
    tr->add_option("--mode", mode)
        ->check(CLI::IsMember({"auto", "direct", "full"}));
    tr->add_flag("--pddl", pddl, "also write a PDDL domain/problem pair");
    add_translate_flags(tr);

    auto* rd = app.add_subcommand("reduce", "FOND to QNP");
    rd->add_option("path", in_path)->required();
    rd->add_option("-o,--output", out_path);
    rd->add_option("--solutions", solutions)
        ->check(CLI::IsMember({"strong-cyclic", "strong"}));
    rd->add_option("--exitg", exitg)
        ->check(CLI::IsMember({"faithful", "repaired"}));
    rd->add_option("--unfair", unfair, "drop fairness of action:index");

    auto* so = app.add_subcommand("solve", "solve a FOND problem");
    so->add_option("path", in_path)->required();
    so->add_option("-o,--output", out_path);
    so->add_flag("--strong", strong, "strong instead of strong-cyclic");

    auto* sq = app.add_subcommand("solve-qnp", "solve a QNP");
    sq->add_option("path", in_path)->required();
    sq->add_option("-o,--output", out_path);
    sq->add_option("--via", via)->check(CLI::IsMember({"full", "oracle"}));
    add_translate_flags(sq);

    auto* ve = app.add_subcommand("verify", "check a policy");
    ve->add_option("model", in_path)->required();
    ve->add_option("policy", pol_path)->required();
    ve->add_flag("--sieve-trace", sieve_trace, "print the termination trace");

    auto* si = app.add_subcommand("simulate", "run rollouts");
    si->add_option("model", in_path)->required();
    si->add_option("policy", pol_path)->required();
    si->add_option("--epsilon", cfg.epsilon);
    si->add_option("--adversary", adversary)
        ->check(CLI::IsMember({"random", "min-step", "zero-jump"}));
    si->add_option("--seed", seed);
    si->add_option("--max-steps", cfg.max_steps);
    si->add_option("--init-high", cfg.init_high);
    si->add_option("--runs", cfg.runs);
    si->add_flag("--trace", dump_trace, "dump per-step numeric states");

    CLI11_PARSE(app, argc, argv);

    try {
        if (max_override > 0) topts.max_override = max_override;
        cfg.seed = static_cast<std::uint64_t>(seed);
        if (v->parsed()) return cli.run_validate(in_path);
        if (tr->parsed())
            return cli.run_translate(in_path, mode, topts, pddl, out_path);
        if (rd->parsed())
            return cli.run_reduce(in_path, solutions, exitg, unfair,
                                  out_path);
        if (so->parsed()) return cli.run_solve(in_path, strong, out_path);
        if (sq->parsed())
            return cli.run_solve_qnp(in_path, via, topts, out_path);
        if (ve->parsed()) return cli.run_verify(in_path, pol_path, sieve_trace);
        if (si->parsed())
            return cli.run_simulate(in_path, pol_path, cfg, adversary,
                                    dump_trace);
    } catch (const qnpk::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qnpk::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
