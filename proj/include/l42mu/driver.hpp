#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l42mu/ast.hpp"
#include "l42mu/compose.hpp"
#include "l42mu/diag.hpp"

namespace l42mu {

struct PipelineOptions {
    bool strict = false;  // skip the interface-member auto-import normalization
    bool prelude = true;
};

struct SourceFile {
    std::string name;
    std::string text;
};

struct SourceMap {
    std::vector<SourceFile> files;

    const std::string& name_of(std::uint32_t file_id) const;
};

// Parse, desugar, qualify and (unless strict) normalize a program.
// diagnostics holds the parse error or all well-formedness violations.
struct LoadedProgram {
    SourceMap sources;
    DeclarationTable table;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return diagnostics.empty(); }
};

LoadedProgram load_sources(std::vector<SourceFile> files, const PipelineOptions& options);
LoadedProgram load_text(std::string text, const PipelineOptions& options,
                        std::string name = "<input>");

// Full front-end + flattening. `full_check` distinguishes check (every
// declaration verified) from flatten (demand-driven verification only).
struct AnalyzedProgram {
    LoadedProgram program;
    CompileResult compiled;

    bool ok() const { return program.ok() && compiled.ok(); }
    std::vector<Diagnostic> diagnostics() const;
};

AnalyzedProgram analyze(LoadedProgram program, const PipelineOptions& options, bool full_check,
                        bool record_trace = false,
                        DemandPolicy policy = DemandPolicy::DemandDriven);
AnalyzedProgram analyze_text(std::string text, const PipelineOptions& options,
                             bool full_check = true, bool record_trace = false);

std::string render_diagnostic(const Diagnostic& diag, const SourceMap& sources);

// Parse a closed expression and qualify bare class names against the table:
// top level first, then a unique nested class of some top-level class.
Expected<ExprPtr> parse_run_expression(const std::string& text, const DeclarationTable& table,
                                       bool prelude);

// Print a value (or any closed expression) with the inverse qualification.
std::string print_value(const Expr& value, const DeclarationTable& table, bool prelude);

// One trace line per compose step: "<decl>: <rule> at <path>".
std::string render_compose_trace(const CompileResult& result, const DeclarationTable& table);

}  // namespace l42mu
