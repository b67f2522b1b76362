#include "l42mu/driver.hpp"

#include <sstream>

#include "l42mu/parse.hpp"
#include "l42mu/print.hpp"
#include "l42mu/wf.hpp"

namespace l42mu {

const std::string& SourceMap::name_of(std::uint32_t file_id) const {
    static const std::string unknown = "<unknown>";
    if (file_id < files.size()) return files[file_id].name;
    return unknown;
}

LoadedProgram load_sources(std::vector<SourceFile> files, const PipelineOptions& options) {
    LoadedProgram out;
    out.sources.files = std::move(files);
    DeclarationTable table;
    for (std::uint32_t id = 0; id < out.sources.files.size(); ++id) {
        auto parsed = parse_program(out.sources.files[id].text, id);
        if (!parsed.ok()) {
            out.diagnostics.push_back(parsed.error());
            return out;
        }
        for (auto& d : parsed.value().decls) table.decls.push_back(d);
    }
    table = qualify_names(table, options.prelude);
    if (!options.strict) table = normalize_interface_imports(table, options.prelude);
    out.diagnostics = wf_program(table, options.prelude);
    out.table = std::move(table);
    return out;
}

LoadedProgram load_text(std::string text, const PipelineOptions& options, std::string name) {
    return load_sources({SourceFile{std::move(name), std::move(text)}}, options);
}

std::vector<Diagnostic> AnalyzedProgram::diagnostics() const {
    if (!program.ok()) return program.diagnostics;
    if (compiled.error) return {*compiled.error};
    return {};
}

AnalyzedProgram analyze(LoadedProgram program, const PipelineOptions& options, bool full_check,
                        bool record_trace, DemandPolicy policy) {
    AnalyzedProgram out;
    out.program = std::move(program);
    if (!out.program.ok()) return out;
    CompileOptions copts;
    copts.prelude = options.prelude;
    copts.full_check = full_check;
    copts.record_trace = record_trace;
    copts.policy = policy;
    out.compiled = compile_program(out.program.table, copts);
    return out;
}

AnalyzedProgram analyze_text(std::string text, const PipelineOptions& options, bool full_check,
                             bool record_trace) {
    return analyze(load_text(std::move(text), options), options, full_check, record_trace);
}

std::string render_diagnostic(const Diagnostic& diag, const SourceMap& sources) {
    std::ostringstream out;
    out << sources.name_of(diag.span.file) << ":" << diag.span.line << ":" << diag.span.col << ": "
        << diag_code_name(diag.code) << ": " << diag.message;
    return out.str();
}

// ---------------------------------------------------------------------------
// run expressions
// ---------------------------------------------------------------------------

namespace {

// A bare class name that is not top level may name a nested class of exactly
// one top-level class.
Expected<TypePath> complete_path(const TypePath& path, const DeclarationTable& table,
                                 bool prelude) {
    if (path.this_rooted()) {
        return make_diag(DiagCode::TypeError, path.span,
                         "This cannot appear in a top-level expression");
    }
    const std::string& root = path.segments.front();
    if (table.index_of(root) >= 0) return path;
    if (prelude && is_prelude_type(root)) return path;
    std::vector<std::string> owners;
    for (const auto& d : table.decls) {
        const CodeLiteral* lit = d.literal();
        if (d.is_class() && lit && lit->find_nested(root)) owners.push_back(d.name);
    }
    if (owners.empty()) {
        return make_diag(DiagCode::TypeError, path.span, "unknown type " + path.str());
    }
    if (owners.size() > 1) {
        return make_diag(DiagCode::TypeError, path.span,
                         "type " + path.str() + " is ambiguous (nested in " + owners[0] + " and " +
                             owners[1] + ")");
    }
    TypePath out = path;
    out.segments.insert(out.segments.begin(), owners.front());
    return out;
}

Expected<ExprPtr> complete_expr(const ExprPtr& e, const DeclarationTable& table, bool prelude) {
    if (const auto* c = std::get_if<CallExpr>(&e->node)) {
        auto recv = complete_expr(c->receiver, table, prelude);
        if (!recv.ok()) return recv.error();
        std::vector<ExprPtr> args;
        for (const auto& a : c->args) {
            auto qa = complete_expr(a, table, prelude);
            if (!qa.ok()) return qa.error();
            args.push_back(std::move(qa).value());
        }
        return make_call(std::move(recv).value(), c->method, std::move(args), e->span);
    }
    if (const auto* s = std::get_if<StaticCallExpr>(&e->node)) {
        auto type = complete_path(s->type, table, prelude);
        if (!type.ok()) return type.error();
        std::vector<ExprPtr> args;
        for (const auto& a : s->args) {
            auto qa = complete_expr(a, table, prelude);
            if (!qa.ok()) return qa.error();
            args.push_back(std::move(qa).value());
        }
        return make_static_call(std::move(type).value(), s->method, std::move(args), e->span);
    }
    return e;
}

}  // namespace

Expected<ExprPtr> parse_run_expression(const std::string& text, const DeclarationTable& table,
                                       bool prelude) {
    auto parsed = parse_expression(text);
    if (!parsed.ok()) return parsed.error();
    return complete_expr(parsed.value(), table, prelude);
}

std::string print_value(const Expr& value, const DeclarationTable& table, bool prelude) {
    TypePrinter printer = [&](const TypePath& path) {
        if (path.segments.size() >= 2 && table.index_of(path.segments.front()) >= 0) {
            TypePath shortened{std::vector<std::string>(path.segments.begin() + 1,
                                                        path.segments.end())};
            auto completed = complete_path(shortened, table, prelude);
            if (completed.ok() && completed.value() == path) return shortened.str();
        }
        return print_type_plain(path);
    };
    return print_expr(value, printer);
}

std::string render_compose_trace(const CompileResult& result, const DeclarationTable& table) {
    std::ostringstream out;
    for (const auto& step : result.trace) {
        out << table.decls[static_cast<size_t>(step.decl_index)].name << ": "
            << compose_rule_name(step.rule) << " at " << step.path << "\n";
    }
    return out.str();
}

}  // namespace l42mu
