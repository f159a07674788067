#pragma once

// Line-oriented parsers and canonical emitters for the .qnp, .fond and
// .pol formats, plus a PDDL exporter for FOND problems.
//
// Emission is canonical: literal lists are sorted by atom position,
// policy rules by abstract state, and emitting twice yields byte-identical
// UTF-8 text with LF line endings.

#include <stdexcept>
#include <string>

#include "qnpk/model.hpp"

namespace qnpk {

struct SourceSpan {
    std::string file;
    int line = 0;  // 1-based
    int col = 0;   // 1-based
};

class ParseError : public std::runtime_error {
public:
    ParseError(SourceSpan span, const std::string& msg);
    const SourceSpan& span() const { return span_; }

private:
    SourceSpan span_;
};

// Syntactically well-formed input that fails model validation; carries the
// individual violations.
class ValidationError : public ParseError {
public:
    ValidationError(SourceSpan span, const std::string& msg,
                    ValidationReport report)
        : ParseError(std::move(span), msg), report(std::move(report)) {}

    ValidationReport report;
};

Qnp parse_qnp(const std::string& text, const std::string& filename = "<qnp>");
TaggedFond parse_fond(const std::string& text,
                      const std::string& filename = "<fond>");

std::string emit_qnp(const Qnp& q);
std::string emit_fond(const TaggedFond& p);

// Policies are serialized against a model's atom universe: one rule per
// line, the comma-separated true atoms in canonical order, "=>", action.
Policy parse_policy(const std::string& text, const AtomUniverse& universe,
                    const std::string& model_name,
                    const std::string& filename = "<pol>");
std::string emit_policy(const Policy& pi, const AtomUniverse& universe,
                        const std::string& model_name);

struct PddlExport {
    std::string domain;
    std::string problem;
};

// Nullary-predicate PDDL with oneof effects. Atom and action names are
// sanitized to PDDL identifiers; the mapping is name-collision free.
PddlExport emit_pddl(const TaggedFond& p);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace qnpk
