#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "l42mu/ast.hpp"
#include "l42mu/diag.hpp"

namespace l42mu {

// One reduction step of the compilation relation, with whole-expression
// snapshots so traces can be replayed.
struct ComposeStep {
    enum class Rule { LookUp, Sum, Rename, Super };

    int decl_index = -1;
    Rule rule = Rule::LookUp;
    std::string path;  // position of the redex: "/", "/0", "/0/1", ...
    CodeExprPtr before;
    CodeExprPtr after;
};

std::string_view compose_rule_name(ComposeStep::Rule rule);

// L1 + L2: union of implements, union of disjoint members, recursive
// composition of same-identity members.
Expected<CodeLiteral> sum_literals(const CodeLiteral& l1, const CodeLiteral& l2);

// Rename nested class `from` to `to` and rewrite every This.from path.
Expected<CodeLiteral> rename_nested(const CodeLiteral& lit, const std::string& from,
                                    const std::string& to);

// Make `target` abstract and copy its body to `alias`. arity < 0 selects the
// unique method named `target` (error if ambiguous).
Expected<CodeLiteral> super_extract(const CodeLiteral& lit, const std::string& target, int arity,
                                    const std::string& alias);

struct StepResult {
    CodeExprPtr expr;
    ComposeStep::Rule rule = ComposeStep::Rule::LookUp;
    std::string path;
};

// Reduce the leftmost-innermost redex under left-to-right call-by-value
// compilation contexts. Pre: expr is not already a literal.
Expected<StepResult> step_compose(const CodeExprPtr& expr, const TableView& prefix);

// Number of literal sub-expressions of E that fail literal typing (checked
// trait-style, with This bound to the literal itself).
int wrong_count(const TableView& view, const CodeExpr& expr);

enum class DemandPolicy { DemandDriven, MaximalPrefix };

struct CompileOptions {
    bool prelude = true;
    bool full_check = true;  // type-check remaining declarations at the end
    bool record_trace = false;
    DemandPolicy policy = DemandPolicy::DemandDriven;
};

using TypecheckHook =
    std::function<std::vector<Diagnostic>(const TableView&, const Declaration&, int)>;

TypecheckHook default_typecheck_hook();

struct CompileResult {
    DeclarationTable table;  // working table; fully flattened on success
    std::vector<ComposeStep> trace;
    std::vector<std::vector<int>> demanded;  // per declaration, sorted indices
    std::optional<Diagnostic> error;

    bool ok() const { return !error.has_value(); }
};

// Interleaved top-down flattening and demand-driven type checking. Classes
// get This substituted by their name once their expression reaches a literal.
CompileResult compile_program(const DeclarationTable& table, const CompileOptions& options = {},
                              const TypecheckHook& hook = default_typecheck_hook());

}  // namespace l42mu
