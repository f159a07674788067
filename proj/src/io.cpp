#include "qnpk/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace qnpk {

ParseError::ParseError(SourceSpan span, const std::string& msg)
    : std::runtime_error(span.file + ":" + std::to_string(span.line) + ":" +
                         std::to_string(span.col) + ": " + msg),
      span_(std::move(span)) {}

namespace {

struct Token {
    std::string text;
    int col;
};

struct Line {
    int number;
    std::vector<Token> tokens;
};

// Tokenize into non-empty lines; '#' starts a comment.
std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    int lineno = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        Line line{lineno, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] == '#') break;
            if (std::isspace(static_cast<unsigned char>(raw[i]))) {
                ++i;
                continue;
            }
            std::size_t start = i;
            while (i < raw.size() && raw[i] != '#' &&
                   !std::isspace(static_cast<unsigned char>(raw[i])))
                ++i;
            line.tokens.push_back(
                {raw.substr(start, i - start), static_cast<int>(start) + 1});
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] void fail(const std::string& file, const Line& line,
                       const Token& tok, const std::string& msg) {
    throw ParseError({file, line.number, tok.col}, msg);
}

[[noreturn]] void fail(const std::string& file, int lineno,
                       const std::string& msg) {
    throw ParseError({file, lineno, 1}, msg);
}

bool valid_name(const std::string& s) {
    if (s.empty() || s[0] == '-') return false;
    for (char c : s)
        if (c == ',' || c == '|' || c == '#') return false;
    return true;
}

// QNP variable names must not look like literal or effect syntax.
bool valid_qnp_var(const std::string& s) {
    if (!valid_name(s)) return false;
    for (char c : s)
        if (c == '=' || c == '>' || c == '+') return false;
    if (s.find("--") != std::string::npos) return false;
    return true;
}

bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() &&
           s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

Literal parse_qnp_literal(const std::string& file, const Line& line,
                          const Token& tok) {
    const std::string& t = tok.text;
    if (ends_with(t, "=0"))
        return {LitKind::NumZero, t.substr(0, t.size() - 2)};
    if (ends_with(t, ">0"))
        return {LitKind::NumPos, t.substr(0, t.size() - 2)};
    if (t[0] == '-') {
        if (t.size() == 1) fail(file, line, tok, "empty literal");
        return {LitKind::BoolNeg, t.substr(1)};
    }
    return {LitKind::BoolPos, t};
}

Literal parse_atom_literal(const std::string& file, const Line& line,
                           const Token& tok) {
    const std::string& t = tok.text;
    if (t[0] == '-') {
        if (t.size() == 1) fail(file, line, tok, "empty literal");
        return {LitKind::BoolNeg, t.substr(1)};
    }
    return {LitKind::BoolPos, t};
}

void ensure_valid(const ValidationReport& report, const std::string& file,
                  const std::string& what) {
    if (report.empty()) return;
    std::string msg = what + " has validation errors:";
    for (const auto& v : report) msg += " [" + v.code + " at " + v.where + "]";
    throw ValidationError({file, 1, 1}, msg, report);
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

Qnp parse_qnp(const std::string& text, const std::string& filename) {
    auto lines = tokenize(text);
    Qnp q;
    QnpAction* current = nullptr;
    bool saw_header = false, saw_init = false, saw_goal = false;

    for (const auto& line : lines) {
        const std::string& kw = line.tokens[0].text;
        auto args = [&](std::size_t from = 1) {
            std::vector<Token> out(line.tokens.begin() + from,
                                   line.tokens.end());
            return out;
        };
        if (kw == "qnp") {
            if (saw_header || line.tokens.size() != 2)
                fail(filename, line, line.tokens[0], "bad qnp header");
            q.name = line.tokens[1].text;
            saw_header = true;
        } else if (kw == "bools" || kw == "nums") {
            for (const auto& t : args()) {
                if (!valid_qnp_var(t.text))
                    fail(filename, line, t, "bad variable name");
                (kw == "bools" ? q.bools : q.nums).push_back(t.text);
            }
        } else if (kw == "action") {
            if (line.tokens.size() != 2)
                fail(filename, line, line.tokens[0], "bad action header");
            if (!valid_name(line.tokens[1].text))
                fail(filename, line, line.tokens[1], "bad action name");
            q.actions.push_back({line.tokens[1].text, {}, {}, {}});
            current = &q.actions.back();
        } else if (kw == "pre") {
            if (!current)
                fail(filename, line, line.tokens[0], "pre outside action");
            for (const auto& t : args())
                current->pre.push_back(parse_qnp_literal(filename, line, t));
        } else if (kw == "eff") {
            if (!current)
                fail(filename, line, line.tokens[0], "eff outside action");
            for (const auto& t : args()) {
                if (ends_with(t.text, "++"))
                    current->num.push_back(
                        {NumEffKind::Inc, t.text.substr(0, t.text.size() - 2)});
                else if (ends_with(t.text, "--"))
                    current->num.push_back(
                        {NumEffKind::Dec, t.text.substr(0, t.text.size() - 2)});
                else {
                    Literal l = parse_qnp_literal(filename, line, t);
                    if (is_num_lit(l))
                        fail(filename, line, t,
                             "numeric literal in effect list");
                    current->eff.push_back(l);
                }
            }
        } else if (kw == "init") {
            if (saw_init) fail(filename, line, line.tokens[0], "repeated init");
            saw_init = true;
            for (const auto& t : args())
                q.init.push_back(parse_qnp_literal(filename, line, t));
        } else if (kw == "goal") {
            if (saw_goal) fail(filename, line, line.tokens[0], "repeated goal");
            saw_goal = true;
            for (const auto& t : args())
                q.goal.push_back(parse_qnp_literal(filename, line, t));
        } else {
            fail(filename, line, line.tokens[0], "unknown directive: " + kw);
        }
    }
    if (!saw_header) fail(filename, 1, "missing qnp header");

    ensure_valid(validate_qnp(q), filename, "qnp " + q.name);

    AtomUniverse u = universe_of(q);
    for (auto& a : q.actions) {
        canonicalize(a.pre, u);
        canonicalize(a.eff, u);
        std::sort(a.num.begin(), a.num.end(),
                  [&](const NumEffect& x, const NumEffect& y) {
                      return u.find(zero_flag(x.var)) < u.find(zero_flag(y.var));
                  });
    }
    canonicalize(q.init, u);
    canonicalize(q.goal, u);
    return q;
}

TaggedFond parse_fond(const std::string& text, const std::string& filename) {
    auto lines = tokenize(text);
    TaggedFond p;
    FondAction* current = nullptr;
    bool saw_header = false, saw_init = false, saw_goal = false;

    for (const auto& line : lines) {
        const std::string& kw = line.tokens[0].text;
        auto args = [&](std::size_t from = 1) {
            std::vector<Token> out(line.tokens.begin() + from,
                                   line.tokens.end());
            return out;
        };
        if (kw == "fond") {
            if (saw_header || line.tokens.size() != 2)
                fail(filename, line, line.tokens[0], "bad fond header");
            p.name = line.tokens[1].text;
            saw_header = true;
        } else if (kw == "atoms") {
            for (const auto& t : args()) {
                if (!valid_name(t.text))
                    fail(filename, line, t, "bad atom name");
                p.atoms.push_back(t.text);
            }
        } else if (kw == "action") {
            if (line.tokens.size() != 2)
                fail(filename, line, line.tokens[0], "bad action header");
            if (!valid_name(line.tokens[1].text))
                fail(filename, line, line.tokens[1], "bad action name");
            p.actions.push_back({line.tokens[1].text, {}, {}, {}, {}});
            current = &p.actions.back();
        } else if (kw == "pre" || kw == "eff") {
            if (!current)
                fail(filename, line, line.tokens[0], kw + " outside action");
            auto& dst = kw == "pre" ? current->pre : current->det;
            for (const auto& t : args())
                dst.push_back(parse_atom_literal(filename, line, t));
        } else if (kw == "oneof") {
            if (!current)
                fail(filename, line, line.tokens[0], "oneof outside action");
            FondEffect eff;
            eff.outcomes.emplace_back();
            for (const auto& t : args()) {
                if (t.text == "|")
                    eff.outcomes.emplace_back();
                else
                    eff.outcomes.back().push_back(
                        parse_atom_literal(filename, line, t));
            }
            current->ndets.push_back(std::move(eff));
        } else if (kw == "tag") {
            if (!current)
                fail(filename, line, line.tokens[0], "tag outside action");
            for (const auto& t : args()) {
                NumEffKind kind;
                std::string rest;
                if (t.text.rfind("inc:", 0) == 0) {
                    kind = NumEffKind::Inc;
                    rest = t.text.substr(4);
                } else if (t.text.rfind("dec:", 0) == 0) {
                    kind = NumEffKind::Dec;
                    rest = t.text.substr(4);
                } else {
                    fail(filename, line, t, "bad tag, expected inc:X/dec:X");
                }
                if (rest.empty()) fail(filename, line, t, "empty tag variable");
                current->tag.entries.push_back({kind, rest});
            }
        } else if (kw == "init") {
            if (saw_init) fail(filename, line, line.tokens[0], "repeated init");
            saw_init = true;
            for (const auto& t : args()) p.init.push_back(t.text);
        } else if (kw == "goal") {
            if (saw_goal) fail(filename, line, line.tokens[0], "repeated goal");
            saw_goal = true;
            for (const auto& t : args())
                p.goal.push_back(parse_atom_literal(filename, line, t));
        } else {
            fail(filename, line, line.tokens[0], "unknown directive: " + kw);
        }
    }
    if (!saw_header) fail(filename, 1, "missing fond header");

    ensure_valid(validate_fond(p), filename, "fond " + p.name);

    AtomUniverse u = universe_of(p);
    for (auto& a : p.actions) {
        canonicalize(a.pre, u);
        canonicalize(a.det, u);
        for (auto& nd : a.ndets)
            for (auto& oc : nd.outcomes) canonicalize(oc, u);
        std::sort(a.tag.entries.begin(), a.tag.entries.end());
    }
    std::sort(p.init.begin(), p.init.end(), [&](const auto& x, const auto& y) {
        return u.find(x) < u.find(y);
    });
    canonicalize(p.goal, u);
    return p;
}

namespace {

std::string lits_to_line(const std::string& kw,
                         const std::vector<Literal>& lits) {
    std::string out = kw;
    for (const auto& l : lits) out += " " + to_string(l);
    return out + "\n";
}

}  // namespace

std::string emit_qnp(const Qnp& q) {
    std::string out = "qnp " + q.name + "\n";
    out += "bools" + (q.bools.empty() ? "" : " " + join(q.bools, " ")) + "\n";
    out += "nums" + (q.nums.empty() ? "" : " " + join(q.nums, " ")) + "\n";
    for (const auto& a : q.actions) {
        out += "action " + a.name + "\n";
        out += lits_to_line("pre", a.pre);
        std::string eff = "eff";
        for (const auto& l : a.eff) eff += " " + to_string(l);
        for (const auto& e : a.num)
            eff += " " + e.var + (e.kind == NumEffKind::Inc ? "++" : "--");
        out += eff + "\n";
    }
    out += lits_to_line("init", q.init);
    out += lits_to_line("goal", q.goal);
    return out;
}

std::string emit_fond(const TaggedFond& p) {
    std::string out = "fond " + p.name + "\n";
    out += "atoms" + (p.atoms.empty() ? "" : " " + join(p.atoms, " ")) + "\n";
    for (const auto& a : p.actions) {
        out += "action " + a.name + "\n";
        out += lits_to_line("pre", a.pre);
        out += lits_to_line("eff", a.det);
        for (const auto& nd : a.ndets) {
            std::string line = "oneof";
            for (std::size_t i = 0; i < nd.outcomes.size(); ++i) {
                if (i) line += " |";
                for (const auto& l : nd.outcomes[i])
                    line += " " + to_string(l);
            }
            out += line + "\n";
        }
        for (const auto& e : a.tag.entries)
            out += std::string("tag ") +
                   (e.kind == NumEffKind::Inc ? "inc:" : "dec:") + e.var + "\n";
    }
    out += "init" + (p.init.empty() ? "" : " " + join(p.init, " ")) + "\n";
    out += lits_to_line("goal", p.goal);
    return out;
}

Policy parse_policy(const std::string& text, const AtomUniverse& universe,
                    const std::string& model_name,
                    const std::string& filename) {
    auto lines = tokenize(text);
    if (lines.empty()) fail(filename, 1, "empty policy file");
    const auto& header = lines[0];
    if (header.tokens[0].text != "policy" || header.tokens.size() != 2)
        fail(filename, header, header.tokens[0], "bad policy header");
    if (header.tokens[1].text != model_name)
        fail(filename, header, header.tokens[1],
             "policy is for model '" + header.tokens[1].text +
                 "', expected '" + model_name + "'");

    Policy pi;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        // tokens up to "=>" name true atoms (comma separated), after it the
        // action
        std::vector<std::string> atoms;
        std::string action;
        bool seen_arrow = false;
        for (const auto& t : line.tokens) {
            if (t.text == "=>") {
                if (seen_arrow) fail(filename, line, t, "duplicate =>");
                seen_arrow = true;
            } else if (!seen_arrow) {
                std::stringstream ss(t.text);
                std::string part;
                while (std::getline(ss, part, ','))
                    if (!part.empty()) atoms.push_back(part);
            } else {
                if (!action.empty())
                    fail(filename, line, t, "trailing tokens after action");
                action = t.text;
            }
        }
        if (!seen_arrow || action.empty())
            fail(filename, line, line.tokens[0], "expected '<atoms> => <action>'");

        AbstractState s(universe.size());
        for (const auto& a : atoms) {
            int i = universe.find(a);
            if (i < 0)
                fail(filename, line, line.tokens[0], "unknown atom: " + a);
            s.set(static_cast<std::size_t>(i), true);
        }
        if (pi.rules.count(s))
            fail(filename, line, line.tokens[0],
                 "two rules for the same state");
        pi.rules.emplace(std::move(s), action);
    }
    return pi;
}

std::string emit_policy(const Policy& pi, const AtomUniverse& universe,
                        const std::string& model_name) {
    std::string out = "policy " + model_name + "\n";
    for (const auto& [state, action] : pi.rules) {
        std::string atoms;
        for (std::size_t i = 0; i < universe.size(); ++i) {
            if (!state.get(i)) continue;
            if (!atoms.empty()) atoms += ",";
            atoms += universe.atoms[i];
        }
        out += atoms + (atoms.empty() ? "=> " : " => ") + action + "\n";
    }
    return out;
}

namespace {

std::string sanitize_pddl(const std::string& name,
                          std::map<std::string, std::string>& taken) {
    std::string s;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
            c == '-')
            s += c;
        else
            s += '_';
    }
    while (!s.empty() && s.back() == '_') s.pop_back();
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0])))
        s = "x" + s;
    std::string candidate = s;
    int n = 2;
    while (taken.count(candidate)) candidate = s + "_" + std::to_string(n++);
    taken.emplace(candidate, name);
    return candidate;
}

std::string pddl_lit(const Literal& l,
                     const std::map<std::string, std::string>& atom_map) {
    const std::string& a = atom_map.at(l.var);
    if (l.kind == LitKind::BoolPos) return "(" + a + ")";
    return "(not (" + a + "))";
}

}  // namespace

PddlExport emit_pddl(const TaggedFond& p) {
    std::map<std::string, std::string> taken;
    std::string domain_name = sanitize_pddl(p.name, taken);

    std::map<std::string, std::string> atom_map;  // atom -> pddl name
    {
        std::map<std::string, std::string> atom_taken;
        for (const auto& a : p.atoms)
            atom_map.emplace(a, sanitize_pddl(a, atom_taken));
    }
    std::map<std::string, std::string> action_taken;

    std::string d = "(define (domain " + domain_name + ")\n";
    d += "  (:requirements :strips :negative-preconditions "
         ":non-deterministic)\n";
    d += "  (:predicates\n";
    for (const auto& a : p.atoms) d += "    (" + atom_map.at(a) + ")\n";
    d += "  )\n";
    for (const auto& act : p.actions) {
        d += "  (:action " + sanitize_pddl(act.name, action_taken) + "\n";
        d += "    :parameters ()\n";
        d += "    :precondition (and";
        for (const auto& l : act.pre) d += " " + pddl_lit(l, atom_map);
        d += ")\n";
        d += "    :effect (and";
        for (const auto& l : act.det) d += " " + pddl_lit(l, atom_map);
        for (const auto& nd : act.ndets) {
            d += " (oneof";
            for (const auto& oc : nd.outcomes) {
                d += " (and";
                for (const auto& l : oc) d += " " + pddl_lit(l, atom_map);
                d += ")";
            }
            d += ")";
        }
        d += ")\n  )\n";
    }
    d += ")\n";

    std::string pr = "(define (problem " + domain_name + "-problem)\n";
    pr += "  (:domain " + domain_name + ")\n";
    pr += "  (:init";
    for (const auto& a : p.init) pr += " (" + atom_map.at(a) + ")";
    pr += ")\n";
    pr += "  (:goal (and";
    for (const auto& l : p.goal) pr += " " + pddl_lit(l, atom_map);
    pr += "))\n)\n";

    return {d, pr};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace qnpk
