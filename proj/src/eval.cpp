#include "l42mu/eval.hpp"

#include <map>

#include "l42mu/print.hpp"
#include "l42mu/typecheck.hpp"

namespace l42mu {

namespace {

bool is_intrinsic_const(const Expr& e) {
    return std::holds_alternative<IntConst>(e.node) || std::holds_alternative<BoolConst>(e.node);
}

ExprPtr substitute(const ExprPtr& body, const std::map<std::string, ExprPtr>& values) {
    if (!body) return body;
    if (const auto* v = std::get_if<VarExpr>(&body->node)) {
        auto it = values.find(v->name);
        return it == values.end() ? body : it->second;
    }
    if (const auto* c = std::get_if<CallExpr>(&body->node)) {
        std::vector<ExprPtr> args;
        args.reserve(c->args.size());
        for (const auto& a : c->args) args.push_back(substitute(a, values));
        return make_call(substitute(c->receiver, values), c->method, std::move(args), body->span);
    }
    if (const auto* s = std::get_if<StaticCallExpr>(&body->node)) {
        std::vector<ExprPtr> args;
        args.reserve(s->args.size());
        for (const auto& a : s->args) args.push_back(substitute(a, values));
        return make_static_call(s->type, s->method, std::move(args), body->span);
    }
    return body;
}

Diagnostic stuck(Span span, std::string msg) {
    return make_diag(DiagCode::Stuck, span, std::move(msg));
}

}  // namespace

bool is_value(const TableView& view, const Expr& e) {
    if (is_intrinsic_const(e)) return true;
    const auto* s = std::get_if<StaticCallExpr>(&e.node);
    if (!s) return false;
    const MethodMember* m = lookup_member(view, s->type, s->method, static_cast<int>(s->args.size()));
    if (!m || !m->sig.is_static || !m->is_abstract()) return false;
    for (const auto& a : s->args) {
        if (!is_value(view, *a)) return false;
    }
    return true;
}

Expected<std::optional<ExprPtr>> intrinsic_step(const Expr& call) {
    const auto* c = std::get_if<CallExpr>(&call.node);
    if (!c) return std::optional<ExprPtr>{};
    if (const auto* lhs = std::get_if<IntConst>(&c->receiver->node)) {
        if (c->args.size() == 1) {
            const auto* rhs = std::get_if<IntConst>(&c->args.front()->node);
            if (!rhs) return std::optional<ExprPtr>{};
            std::int64_t a = lhs->value, b = rhs->value;
            if (c->method == "add") return std::optional<ExprPtr>(make_int(a + b, call.span));
            if (c->method == "sub") return std::optional<ExprPtr>(make_int(a - b, call.span));
            if (c->method == "mul") return std::optional<ExprPtr>(make_int(a * b, call.span));
            if (c->method == "div") {
                if (b == 0) return stuck(call.span, "division by zero");
                return std::optional<ExprPtr>(make_int(a / b, call.span));
            }
            if (c->method == "eq") return std::optional<ExprPtr>(make_bool(a == b, call.span));
            if (c->method == "lt") return std::optional<ExprPtr>(make_bool(a < b, call.span));
        }
        return std::optional<ExprPtr>{};
    }
    if (const auto* lhs = std::get_if<BoolConst>(&c->receiver->node)) {
        if (c->args.size() == 1) {
            const auto* rhs = std::get_if<BoolConst>(&c->args.front()->node);
            if (!rhs) return std::optional<ExprPtr>{};
            bool a = lhs->value, b = rhs->value;
            if (c->method == "and") return std::optional<ExprPtr>(make_bool(a && b, call.span));
            if (c->method == "or") return std::optional<ExprPtr>(make_bool(a || b, call.span));
        }
        if (c->args.empty() && c->method == "not") {
            return std::optional<ExprPtr>(make_bool(!lhs->value, call.span));
        }
        return std::optional<ExprPtr>{};
    }
    return std::optional<ExprPtr>{};
}

namespace {

Expected<EvalStep> step_rec(const TableView& view, const ExprPtr& e) {
    if (std::holds_alternative<VarExpr>(e->node)) {
        return stuck(e->span, "free variable " + std::get<VarExpr>(e->node).name);
    }

    if (const auto* s = std::get_if<StaticCallExpr>(&e->node)) {
        for (size_t i = 0; i < s->args.size(); ++i) {
            if (!is_value(view, *s->args[i])) {
                auto inner = step_rec(view, s->args[i]);
                if (!inner.ok()) return inner;
                std::vector<ExprPtr> args = s->args;
                args[i] = inner.value().expr;
                return EvalStep{make_static_call(s->type, s->method, std::move(args), e->span),
                                inner.value().rule};
            }
        }
        const MethodMember* m =
            lookup_member(view, s->type, s->method, static_cast<int>(s->args.size()));
        if (!m) {
            return stuck(e->span, "type " + s->type.str() + " has no method " + s->method + "/" +
                                      std::to_string(s->args.size()));
        }
        if (!m->sig.is_static) {
            return stuck(e->span, "method " + s->method + " of " + s->type.str() + " is not static");
        }
        if (m->is_abstract()) {
            return stuck(e->span, "call to abstract static method is already a value");
        }
        std::map<std::string, ExprPtr> env;
        for (size_t i = 0; i < m->sig.params.size(); ++i) env[m->sig.params[i].name] = s->args[i];
        return EvalStep{substitute(m->body, env), "static"};
    }

    const auto* c = std::get_if<CallExpr>(&e->node);
    if (!c) return stuck(e->span, "constant cannot be reduced");
    if (!is_value(view, *c->receiver)) {
        auto inner = step_rec(view, c->receiver);
        if (!inner.ok()) return inner;
        return EvalStep{make_call(inner.value().expr, c->method, c->args, e->span),
                        inner.value().rule};
    }
    for (size_t i = 0; i < c->args.size(); ++i) {
        if (!is_value(view, *c->args[i])) {
            auto inner = step_rec(view, c->args[i]);
            if (!inner.ok()) return inner;
            std::vector<ExprPtr> args = c->args;
            args[i] = inner.value().expr;
            return EvalStep{make_call(c->receiver, c->method, std::move(args), e->span),
                            inner.value().rule};
        }
    }

    if (is_intrinsic_const(*c->receiver)) {
        auto native = intrinsic_step(*e);
        if (!native.ok()) return native.error();
        if (native.value().has_value()) return EvalStep{*native.value(), "intrinsic"};
        return stuck(e->span, "no intrinsic operation " + c->method + "/" +
                                  std::to_string(c->args.size()));
    }

    // Receiver is a factory call T.f(v...).
    const auto& recv = std::get<StaticCallExpr>(c->receiver->node);
    const MethodMember* m =
        lookup_member(view, recv.type, c->method, static_cast<int>(c->args.size()));
    if (!m) {
        return stuck(e->span, "type " + recv.type.str() + " has no method " + c->method + "/" +
                                  std::to_string(c->args.size()));
    }
    if (m->sig.is_static) {
        return stuck(e->span, "static method " + c->method + " called on an instance");
    }
    if (!m->is_abstract()) {
        std::map<std::string, ExprPtr> env;
        env["this"] = c->receiver;
        for (size_t i = 0; i < m->sig.params.size(); ++i) env[m->sig.params[i].name] = c->args[i];
        return EvalStep{substitute(m->body, env), "invoke"};
    }

    // Abstract instance method on a value: a state operation of the factory.
    const MethodMember* factory =
        lookup_member(view, recv.type, recv.method, static_cast<int>(recv.args.size()));
    if (factory) {
        if (c->args.empty()) {
            for (size_t i = 0; i < factory->sig.params.size(); ++i) {
                if (factory->sig.params[i].name == c->method) {
                    return EvalStep{recv.args[i], "getter"};
                }
            }
        } else if (c->args.size() == 1) {
            std::string param = wither_param(c->method);
            if (!param.empty()) {
                for (size_t i = 0; i < factory->sig.params.size(); ++i) {
                    if (factory->sig.params[i].name == param) {
                        std::vector<ExprPtr> args = recv.args;
                        args[i] = c->args.front();
                        return EvalStep{
                            make_static_call(recv.type, recv.method, std::move(args), e->span),
                            "wither"};
                    }
                }
            }
        }
    }
    return stuck(e->span, "abstract method " + c->method + " of " + recv.type.str() +
                              " is not a state operation");
}

}  // namespace

Expected<EvalStep> step_expr(const TableView& view, const ExprPtr& e) {
    return step_rec(view, e);
}

RunResult run(Machine machine) {
    RunResult result;
    while (!is_value(machine.view, *machine.expr)) {
        if (machine.fuel <= 0) {
            result.error = make_diag(DiagCode::FuelExhausted, machine.expr->span,
                                     "step budget exhausted after " +
                                         std::to_string(result.steps) + " steps");
            result.trace = std::move(machine.trace);
            return result;
        }
        auto step = step_expr(machine.view, machine.expr);
        if (!step.ok()) {
            result.error = step.error();
            result.trace = std::move(machine.trace);
            return result;
        }
        machine.expr = step.value().expr;
        --machine.fuel;
        ++result.steps;
        if (machine.record_trace) machine.trace.push_back(step.value());
    }
    result.value = machine.expr;
    result.trace = std::move(machine.trace);
    return result;
}

RunResult run(const TableView& view, ExprPtr expr, long long fuel, bool record_trace) {
    Machine m;
    m.view = view;
    m.expr = std::move(expr);
    m.fuel = fuel;
    m.record_trace = record_trace;
    return run(std::move(m));
}

}  // namespace l42mu
