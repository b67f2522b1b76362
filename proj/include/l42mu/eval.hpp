#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l42mu/ast.hpp"
#include "l42mu/diag.hpp"

namespace l42mu {

inline constexpr long long kDefaultFuel = 1'000'000;

// Values: calls to abstract static methods with value arguments, plus the
// intrinsic int/bool constants.
bool is_value(const TableView& view, const Expr& e);

struct EvalStep {
    ExprPtr expr;
    const char* rule;  // "static", "invoke", "getter", "wither", "intrinsic"
};

// Reduce the unique leftmost redex. Pre: e is closed and not a value.
Expected<EvalStep> step_expr(const TableView& view, const ExprPtr& e);

// Intrinsic dispatch for calls on int/bool constants. Empty optional: the
// call is not intrinsic. Division by zero is a Stuck diagnostic.
Expected<std::optional<ExprPtr>> intrinsic_step(const Expr& call);

struct Machine {
    TableView view;
    ExprPtr expr;
    long long fuel = kDefaultFuel;
    bool record_trace = false;
    std::vector<EvalStep> trace;
};

struct RunResult {
    ExprPtr value;  // null on error
    std::optional<Diagnostic> error;
    long long steps = 0;
    std::vector<EvalStep> trace;

    bool ok() const { return !error.has_value(); }
};

RunResult run(Machine machine);
RunResult run(const TableView& view, ExprPtr expr, long long fuel = kDefaultFuel,
              bool record_trace = false);

}  // namespace l42mu
