#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "l42mu/driver.hpp"
#include "l42mu/eval.hpp"
#include "l42mu/harness.hpp"
#include "l42mu/print.hpp"
#include "l42mu/typecheck.hpp"
#include "l42mu/wf.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProgramError = 1;
constexpr int kExitUsage = 2;

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

int load_inputs(const std::vector<std::string>& paths, std::vector<l42mu::SourceFile>& files) {
    for (const auto& path : paths) {
        std::string text;
        if (!read_file(path, text)) {
            std::cerr << "error: cannot read " << path << "\n";
            return kExitUsage;
        }
        files.push_back(l42mu::SourceFile{path, std::move(text)});
    }
    return kExitOk;
}

int report(const l42mu::AnalyzedProgram& analyzed) {
    for (const auto& d : analyzed.diagnostics()) {
        std::cerr << l42mu::render_diagnostic(d, analyzed.program.sources) << "\n";
    }
    return analyzed.ok() ? kExitOk : kExitProgramError;
}

struct CommonFlags {
    std::vector<std::string> paths;
    bool strict = false;
    bool no_prelude = false;

    l42mu::PipelineOptions pipeline() const { return {strict, !no_prelude}; }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("files", flags.paths, "input .l42mu source files")
        ->required()
        ->expected(-1);
    cmd->add_flag("--strict", flags.strict,
                  "formalism mode: no interface-member auto-import");
    cmd->add_flag("--no-prelude", flags.no_prelude, "disable the Int/Bool/Void prelude");
}

int cmd_check(const CommonFlags& flags, const std::string& explain) {
    std::vector<l42mu::SourceFile> files;
    if (int rc = load_inputs(flags.paths, files); rc != kExitOk) return rc;
    auto analyzed = l42mu::analyze(l42mu::load_sources(std::move(files), flags.pipeline()),
                                   flags.pipeline(), /*full_check=*/true);
    int rc = report(analyzed);
    if (rc != kExitOk || explain.empty()) return rc;

    l42mu::TypePath path;
    std::stringstream segs(explain);
    std::string seg;
    while (std::getline(segs, seg, '.')) path.segments.push_back(seg);
    l42mu::TableView view;
    view.table = &analyzed.compiled.table;
    view.prelude = !flags.no_prelude;
    const l42mu::CodeLiteral* lit = l42mu::lookup_type(view, path);
    if (!lit) {
        std::cerr << "error: unknown type " << explain << "\n";
        return kExitProgramError;
    }
    std::cout << l42mu::explain_coherence(path, *lit);
    return kExitOk;
}

int cmd_flatten(const CommonFlags& flags, bool trace) {
    std::vector<l42mu::SourceFile> files;
    if (int rc = load_inputs(flags.paths, files); rc != kExitOk) return rc;
    // Flattening performs demand-driven verification only; check runs the
    // full gate.
    auto analyzed = l42mu::analyze(l42mu::load_sources(std::move(files), flags.pipeline()),
                                   flags.pipeline(), /*full_check=*/false, /*record_trace=*/trace);
    if (int rc = report(analyzed); rc != kExitOk) return rc;
    if (trace) std::cerr << l42mu::render_compose_trace(analyzed.compiled, analyzed.compiled.table);
    std::cout << l42mu::canonical_print(analyzed.compiled.table, !flags.no_prelude);
    return kExitOk;
}

int cmd_run(const CommonFlags& flags, const std::string& expr_text, bool steps, long long fuel) {
    std::vector<l42mu::SourceFile> files;
    if (int rc = load_inputs(flags.paths, files); rc != kExitOk) return rc;
    auto analyzed = l42mu::analyze(l42mu::load_sources(std::move(files), flags.pipeline()),
                                   flags.pipeline(), /*full_check=*/true);
    if (int rc = report(analyzed); rc != kExitOk) return rc;

    const l42mu::DeclarationTable& table = analyzed.compiled.table;
    auto expr = l42mu::parse_run_expression(expr_text, table, !flags.no_prelude);
    l42mu::SourceMap expr_sources;
    expr_sources.files.push_back(l42mu::SourceFile{"<expr>", expr_text});
    if (!expr.ok()) {
        std::cerr << l42mu::render_diagnostic(expr.error(), expr_sources) << "\n";
        return kExitProgramError;
    }
    l42mu::TableView view;
    view.table = &table;
    view.prelude = !flags.no_prelude;
    auto typed = l42mu::type_expr(view, l42mu::TypeEnv{}, *expr.value());
    if (!typed.ok()) {
        std::cerr << l42mu::render_diagnostic(typed.error(), expr_sources) << "\n";
        return kExitProgramError;
    }
    l42mu::RunResult result = l42mu::run(view, expr.value(), fuel, steps);
    if (steps) {
        long long n = 0;
        for (const auto& step : result.trace) {
            std::cerr << ++n << ": " << step.rule << " "
                      << l42mu::print_value(*step.expr, table, !flags.no_prelude) << "\n";
        }
    }
    if (!result.ok()) {
        std::cerr << l42mu::render_diagnostic(*result.error, expr_sources) << "\n";
        return kExitProgramError;
    }
    std::cout << l42mu::print_value(*result.value, table, !flags.no_prelude) << "\n";
    return kExitOk;
}

int cmd_fuzz(const std::string& check, std::uint64_t seed, int count, const std::string& out_dir) {
    l42mu::FuzzSummary summary;
    if (check == "a2") {
        summary = l42mu::fuzz_a2(seed, count, out_dir);
    } else if (check == "a1") {
        summary = l42mu::fuzz_a1(seed, count, /*exprs_per_table=*/25, /*fuel=*/100000, out_dir);
    } else {
        summary = l42mu::fuzz_algebra(seed, count, out_dir);
    }
    std::cout << check << ": " << summary.tables << " cases, " << summary.failures << " failures";
    if (summary.skipped) std::cout << ", " << summary.skipped << " skipped";
    if (check == "a2") std::cout << ", divergence " << summary.divergence;
    std::cout << " (" << summary.detail << ")\n";
    return summary.failures == 0 ? kExitOk : kExitProgramError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"42mu: traits composed by flattening, classes for use"};
    app.require_subcommand(1);

    CommonFlags check_flags;
    std::string explain;
    CLI::App* check = app.add_subcommand("check", "parse, flatten and type-check programs");
    add_common(check, check_flags);
    check->add_option("--explain-coherence", explain,
                      "print the abstract-state report for a type");

    CommonFlags flatten_flags;
    bool trace = false;
    CLI::App* flatten = app.add_subcommand("flatten", "print the flattened program");
    add_common(flatten, flatten_flags);
    flatten->add_flag("--trace", trace, "print one line per composition step");

    CommonFlags run_flags;
    std::string expr_text;
    bool steps = false;
    long long fuel = l42mu::kDefaultFuel;
    CLI::App* run = app.add_subcommand("run", "evaluate an expression against a program");
    add_common(run, run_flags);
    run->add_option("-e,--expr", expr_text, "expression to evaluate")->required();
    run->add_flag("--steps", steps, "print the reduction trace");
    run->add_option("--fuel", fuel, "step budget");

    std::string fuzz_check = "a2";
    std::uint64_t seed = 0;
    int count = 100;
    std::string out_dir = "counterexamples";
    CLI::App* fuzz = app.add_subcommand("fuzz", "random-program property checks");
    fuzz->add_option("--check", fuzz_check, "property to check")
        ->check(CLI::IsMember({"a1", "a2", "algebra"}));
    fuzz->add_option("--seed", seed, "base seed");
    fuzz->add_option("--count", count, "number of cases");
    fuzz->add_option("--out", out_dir, "directory for shrunken counterexamples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (check->parsed()) return cmd_check(check_flags, explain);
    if (flatten->parsed()) return cmd_flatten(flatten_flags, trace);
    if (run->parsed()) return cmd_run(run_flags, expr_text, steps, fuel);
    return cmd_fuzz(fuzz_check, seed, count, out_dir);
}
