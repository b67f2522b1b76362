#include "l42mu/compose.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "l42mu/typecheck.hpp"
#include "l42mu/wf.hpp"

namespace l42mu {

std::string_view compose_rule_name(ComposeStep::Rule rule) {
    switch (rule) {
        case ComposeStep::Rule::LookUp: return "look-up";
        case ComposeStep::Rule::Sum: return "sum";
        case ComposeStep::Rule::Rename: return "rename";
        case ComposeStep::Rule::Super: return "super";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// SUM
// ---------------------------------------------------------------------------

namespace {

std::string member_id(const MethodSig& sig) {
    return sig.name + "/" + std::to_string(sig.arity());
}

Expected<CodeLiteral> sum_rec(const CodeLiteral& l1, const CodeLiteral& l2,
                              const std::string& where) {
    if (l1.is_interface != l2.is_interface) {
        return make_diag(DiagCode::ClassClash, l2.span,
                         where.empty()
                             ? "a class is composed with an interface"
                             : "nested class " + where + " is composed with an interface");
    }
    CodeLiteral out;
    out.is_interface = l1.is_interface;
    out.span = l1.span;
    out.implements = l1.implements;
    for (const auto& t : l2.implements) {
        bool present = false;
        for (const auto& u : out.implements) present = present || u == t;
        if (!present) out.implements.push_back(t);
    }

    // Clashes are selected by canonical member identity (nested classes
    // before methods), so the reported error does not depend on operand or
    // member order.
    std::vector<std::pair<std::string, Diagnostic>> clashes;
    char arity_key[8];

    for (const auto& m : l1.members) {
        if (const auto* mm = m.as_method()) {
            const MethodMember* other = l2.find_method(mm->sig.name, mm->sig.arity());
            if (!other) {
                out.members.push_back(m);
                continue;
            }
            std::snprintf(arity_key, sizeof arity_key, "%03d", mm->sig.arity());
            std::string key = "1:" + mm->sig.name + "/" + arity_key;
            if (!same_signature(mm->sig, other->sig)) {
                clashes.emplace_back(key, make_diag(DiagCode::MethodClash, other->sig.span,
                                                    "method " + where + member_id(mm->sig) +
                                                        " is composed with a different header"));
                continue;
            }
            if (mm->body && other->body) {
                clashes.emplace_back(key, make_diag(DiagCode::MethodClash, other->sig.span,
                                                    "method " + where + member_id(mm->sig) +
                                                        " is implemented by both operands"));
                continue;
            }
            out.members.push_back(
                Member{MethodMember{mm->sig, mm->body ? mm->body : other->body}});
        } else {
            const auto& nc = std::get<NestedClass>(m.node);
            const NestedClass* other = l2.find_nested(nc.name);
            if (!other) {
                out.members.push_back(m);
                continue;
            }
            auto merged = sum_rec(*nc.body, *other->body,
                                  where.empty() ? nc.name + "." : where + nc.name + ".");
            if (!merged.ok()) {
                clashes.emplace_back("0:" + nc.name, merged.error());
                continue;
            }
            out.members.push_back(
                Member{NestedClass{nc.name, make_literal(std::move(merged).value()), nc.span}});
        }
    }
    if (!clashes.empty()) {
        std::sort(clashes.begin(), clashes.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return clashes.front().second;
    }
    for (const auto& m : l2.members) {
        if (const auto* mm = m.as_method()) {
            if (!l1.find_method(mm->sig.name, mm->sig.arity())) out.members.push_back(m);
        } else {
            const auto& nc = std::get<NestedClass>(m.node);
            if (!l1.find_nested(nc.name)) out.members.push_back(m);
        }
    }
    return out;
}

}  // namespace

Expected<CodeLiteral> sum_literals(const CodeLiteral& l1, const CodeLiteral& l2) {
    return sum_rec(l1, l2, "");
}

// ---------------------------------------------------------------------------
// rename
// ---------------------------------------------------------------------------

namespace {

TypePath rename_path(const TypePath& p, const std::string& from, const std::string& to) {
    if (p.segments.size() >= 2 && p.this_rooted() && p.segments[1] == from) {
        TypePath out = p;
        out.segments[1] = to;
        return out;
    }
    return p;
}

ExprPtr rename_expr(const ExprPtr& e, const std::string& from, const std::string& to) {
    if (!e) return e;
    if (const auto* c = std::get_if<CallExpr>(&e->node)) {
        std::vector<ExprPtr> args;
        args.reserve(c->args.size());
        for (const auto& a : c->args) args.push_back(rename_expr(a, from, to));
        return make_call(rename_expr(c->receiver, from, to), c->method, std::move(args), e->span);
    }
    if (const auto* s = std::get_if<StaticCallExpr>(&e->node)) {
        std::vector<ExprPtr> args;
        args.reserve(s->args.size());
        for (const auto& a : s->args) args.push_back(rename_expr(a, from, to));
        return make_static_call(rename_path(s->type, from, to), s->method, std::move(args),
                                e->span);
    }
    return e;
}

CodeLiteral rename_paths_in(const CodeLiteral& lit, const std::string& from,
                            const std::string& to) {
    CodeLiteral out = lit;
    for (auto& t : out.implements) t = rename_path(t, from, to);
    for (auto& m : out.members) {
        if (auto* mm = std::get_if<MethodMember>(&m.node)) {
            for (auto& p : mm->sig.params) p.type = rename_path(p.type, from, to);
            mm->sig.return_type = rename_path(mm->sig.return_type, from, to);
            mm->body = rename_expr(mm->body, from, to);
        } else {
            auto& nc = std::get<NestedClass>(m.node);
            nc.body = make_literal(rename_paths_in(*nc.body, from, to));
        }
    }
    return out;
}

}  // namespace

Expected<CodeLiteral> rename_nested(const CodeLiteral& lit, const std::string& from,
                                    const std::string& to) {
    const NestedClass* target = lit.find_nested(from);
    if (!target) {
        return make_diag(DiagCode::NotWellFormed, lit.span,
                         "rename: no nested class " + from);
    }
    if (from == to) return lit;
    if (lit.find_nested(to)) {
        return make_diag(DiagCode::NotWellFormed, lit.span,
                         "rename: nested class " + to + " already exists");
    }
    CodeLiteral out = rename_paths_in(lit, from, to);
    for (auto& m : out.members) {
        if (auto* nc = std::get_if<NestedClass>(&m.node)) {
            if (nc->name == from) nc->name = to;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// super ... as
// ---------------------------------------------------------------------------

Expected<CodeLiteral> super_extract(const CodeLiteral& lit, const std::string& target, int arity,
                                    const std::string& alias) {
    const MethodMember* found = nullptr;
    if (arity >= 0) {
        found = lit.find_method(target, arity);
        if (!found) {
            return make_diag(DiagCode::NotWellFormed, lit.span,
                             "super: no method " + target + "/" + std::to_string(arity));
        }
    } else {
        auto candidates = lit.methods_named(target);
        if (candidates.empty()) {
            return make_diag(DiagCode::NotWellFormed, lit.span, "super: no method " + target);
        }
        if (candidates.size() > 1) {
            return make_diag(DiagCode::NotWellFormed, lit.span,
                             "super: method " + target + " is overloaded, specify an arity");
        }
        found = candidates.front();
    }
    if (found->is_abstract()) {
        return make_diag(DiagCode::NotWellFormed, found->sig.span,
                         "super: method " + target + " is already abstract");
    }
    if (lit.find_method(alias, found->sig.arity())) {
        return make_diag(DiagCode::NotWellFormed, lit.span,
                         "super: method " + alias + "/" + std::to_string(found->sig.arity()) +
                             " already exists");
    }
    CodeLiteral out = lit;
    ExprPtr body;
    for (auto& m : out.members) {
        if (auto* mm = std::get_if<MethodMember>(&m.node)) {
            if (mm->sig.name == found->sig.name && mm->sig.arity() == found->sig.arity()) {
                body = mm->body;
                mm->body = nullptr;
            }
        }
    }
    MethodSig alias_sig = found->sig;
    alias_sig.name = alias;
    out.members.push_back(Member{MethodMember{std::move(alias_sig), std::move(body)}});
    return out;
}

// ---------------------------------------------------------------------------
// single-step reduction
// ---------------------------------------------------------------------------

namespace {

Diagnostic with_default_span(Diagnostic d, Span fallback) {
    if (d.span.line == 0) d.span = fallback;
    return d;
}

Expected<StepResult> step_at(const CodeExprPtr& e, const TableView& prefix,
                             const std::string& path) {
    if (const auto* t = std::get_if<TraitRef>(&e->node)) {
        if (!prefix.table) {
            return make_diag(DiagCode::UnknownTrait, e->span, "trait " + t->name + " is unbound");
        }
        int idx = prefix.table->index_of(t->name);
        if (idx < 0) {
            return make_diag(DiagCode::UnknownTrait, e->span, "trait " + t->name + " is unbound");
        }
        if (prefix.limit >= 0 && idx >= prefix.limit) {
            return make_diag(DiagCode::OrderError, e->span,
                             "trait " + t->name + " is not compiled yet");
        }
        const CodeLiteral* lit = prefix.table->decls[static_cast<size_t>(idx)].literal();
        if (!lit) {
            return make_diag(DiagCode::OrderError, e->span,
                             "trait " + t->name + " is not flattened yet");
        }
        return StepResult{make_lit_expr(*lit, e->span), ComposeStep::Rule::LookUp, path};
    }
    if (const auto* s = std::get_if<SumExpr>(&e->node)) {
        if (!s->lhs->as_lit()) {
            auto inner = step_at(s->lhs, prefix, path + "/0");
            if (!inner.ok()) return inner.error();
            StepResult r = std::move(inner).value();
            r.expr = make_code_expr(CodeExpr{SumExpr{r.expr, s->rhs}, e->span});
            return r;
        }
        if (!s->rhs->as_lit()) {
            auto inner = step_at(s->rhs, prefix, path + "/1");
            if (!inner.ok()) return inner.error();
            StepResult r = std::move(inner).value();
            r.expr = make_code_expr(CodeExpr{SumExpr{s->lhs, r.expr}, e->span});
            return r;
        }
        auto sum = sum_literals(s->lhs->as_lit()->lit, s->rhs->as_lit()->lit);
        if (!sum.ok()) return with_default_span(sum.error(), e->span);
        return StepResult{make_lit_expr(std::move(sum).value(), e->span), ComposeStep::Rule::Sum,
                          path};
    }
    if (const auto* r = std::get_if<RenameExpr>(&e->node)) {
        if (!r->base->as_lit()) {
            auto inner = step_at(r->base, prefix, path + "/0");
            if (!inner.ok()) return inner.error();
            StepResult res = std::move(inner).value();
            res.expr =
                make_code_expr(CodeExpr{RenameExpr{res.expr, r->from, r->to}, e->span});
            return res;
        }
        auto renamed = rename_nested(r->base->as_lit()->lit, r->from, r->to);
        if (!renamed.ok()) return with_default_span(renamed.error(), e->span);
        return StepResult{make_lit_expr(std::move(renamed).value(), e->span),
                          ComposeStep::Rule::Rename, path};
    }
    if (const auto* sa = std::get_if<SuperAsExpr>(&e->node)) {
        if (!sa->base->as_lit()) {
            auto inner = step_at(sa->base, prefix, path + "/0");
            if (!inner.ok()) return inner.error();
            StepResult res = std::move(inner).value();
            res.expr = make_code_expr(
                CodeExpr{SuperAsExpr{res.expr, sa->target, sa->arity, sa->alias}, e->span});
            return res;
        }
        auto extracted =
            super_extract(sa->base->as_lit()->lit, sa->target, sa->arity, sa->alias);
        if (!extracted.ok()) return with_default_span(extracted.error(), e->span);
        return StepResult{make_lit_expr(std::move(extracted).value(), e->span),
                          ComposeStep::Rule::Super, path};
    }
    return make_diag(DiagCode::NotWellFormed, e->span, "expression is already a literal");
}

}  // namespace

Expected<StepResult> step_compose(const CodeExprPtr& expr, const TableView& prefix) {
    auto result = step_at(expr, prefix, "");
    if (result.ok()) {
        StepResult r = std::move(result).value();
        if (r.path.empty()) r.path = "/";
        return r;
    }
    return result;
}

// ---------------------------------------------------------------------------
// wrong count
// ---------------------------------------------------------------------------

int wrong_count(const TableView& view, const CodeExpr& expr) {
    if (const auto* l = expr.as_lit()) {
        TableView v = view.with_this(&l->lit);
        auto diags = check_literal(v, TypePath{std::string(kThisName)}, l->lit);
        return diags.empty() ? 0 : 1;
    }
    if (const auto* s = std::get_if<SumExpr>(&expr.node)) {
        return wrong_count(view, *s->lhs) + wrong_count(view, *s->rhs);
    }
    if (const auto* r = std::get_if<RenameExpr>(&expr.node)) return wrong_count(view, *r->base);
    if (const auto* sa = std::get_if<SuperAsExpr>(&expr.node)) return wrong_count(view, *sa->base);
    return 0;
}

// ---------------------------------------------------------------------------
// compile driver
// ---------------------------------------------------------------------------

namespace {

void collect_trait_refs(const CodeExprPtr& e, std::vector<const CodeExpr*>& out) {
    if (!e) return;
    if (std::holds_alternative<TraitRef>(e->node)) {
        out.push_back(e.get());
        return;
    }
    if (const auto* s = std::get_if<SumExpr>(&e->node)) {
        collect_trait_refs(s->lhs, out);
        collect_trait_refs(s->rhs, out);
    }
    if (const auto* r = std::get_if<RenameExpr>(&e->node)) collect_trait_refs(r->base, out);
    if (const auto* sa = std::get_if<SuperAsExpr>(&e->node)) collect_trait_refs(sa->base, out);
}

void collect_type_roots_expr(const ExprPtr& e, std::vector<std::pair<std::string, Span>>& out) {
    if (!e) return;
    if (const auto* c = std::get_if<CallExpr>(&e->node)) {
        collect_type_roots_expr(c->receiver, out);
        for (const auto& a : c->args) collect_type_roots_expr(a, out);
    }
    if (const auto* s = std::get_if<StaticCallExpr>(&e->node)) {
        if (!s->type.this_rooted()) out.emplace_back(s->type.segments.front(), s->type.span);
        for (const auto& a : s->args) collect_type_roots_expr(a, out);
    }
}

// Top-level names referenced from a literal's types (implements, signatures,
// static-call receivers), pre-order.
void collect_type_roots(const CodeLiteral& lit, std::vector<std::pair<std::string, Span>>& out) {
    for (const auto& t : lit.implements) {
        if (!t.this_rooted()) out.emplace_back(t.segments.front(), t.span);
    }
    for (const auto& m : lit.members) {
        if (const auto* mm = m.as_method()) {
            for (const auto& p : mm->sig.params) {
                if (!p.type.this_rooted()) out.emplace_back(p.type.segments.front(), p.type.span);
            }
            if (!mm->sig.return_type.this_rooted()) {
                out.emplace_back(mm->sig.return_type.segments.front(), mm->sig.return_type.span);
            }
            collect_type_roots_expr(mm->body, out);
        } else {
            collect_type_roots(*std::get<NestedClass>(m.node).body, out);
        }
    }
}

void for_each_literal_operand(const CodeExprPtr& e,
                              const std::function<void(const CodeLiteral&)>& fn) {
    if (!e) return;
    if (const auto* l = e->as_lit()) {
        fn(l->lit);
        return;
    }
    if (const auto* s = std::get_if<SumExpr>(&e->node)) {
        for_each_literal_operand(s->lhs, fn);
        for_each_literal_operand(s->rhs, fn);
    }
    if (const auto* r = std::get_if<RenameExpr>(&e->node)) for_each_literal_operand(r->base, fn);
    if (const auto* sa = std::get_if<SuperAsExpr>(&e->node))
        for_each_literal_operand(sa->base, fn);
}

struct Compiler {
    const CompileOptions& options;
    const TypecheckHook& hook;
    CompileResult result;
    std::vector<bool> verified;

    explicit Compiler(const DeclarationTable& table, const CompileOptions& opts,
                      const TypecheckHook& h)
        : options(opts), hook(h) {
        result.table = table;
        result.demanded.resize(table.decls.size());
        verified.assign(table.decls.size(), false);
    }

    bool fail(Diagnostic d, int decl_index) {
        d.decl_index = decl_index;
        result.error = std::move(d);
        return false;
    }

    TableView view_at(int i) const {
        TableView v;
        v.table = &result.table;
        v.prelude = options.prelude;
        v.limit = i;
        v.current = i;
        return v;
    }

    bool source_literals_consistent(int i) {
        const TableView base = view_at(i);
        bool ok = true;
        for_each_literal_operand(result.table.decls[static_cast<size_t>(i)].body,
                                 [&](const CodeLiteral& lit) {
                                     if (!ok) return;
                                     auto diags = consistent_subtype(base.with_this(&lit), lit);
                                     if (!diags.empty()) ok = !fail(diags.front(), i);
                                 });
        return ok;
    }

    // Demand-driven dependency closure of declaration i; typechecks members.
    bool demand_and_check(int i) {
        const TableView view = view_at(i);
        const auto& decl = result.table.decls[static_cast<size_t>(i)];
        std::vector<const CodeExpr*> refs;
        collect_trait_refs(decl.body, refs);

        std::vector<int> queue;
        std::set<int> in_closure;
        for (const CodeExpr* ref : refs) {
            const std::string& name = std::get<TraitRef>(ref->node).name;
            int idx = result.table.index_of(name);
            if (idx < 0) {
                return fail(make_diag(DiagCode::UnknownTrait, ref->span,
                                      "trait " + name + " is not declared"),
                            i);
            }
            if (idx >= i) {
                return fail(make_diag(DiagCode::OrderError, ref->span,
                                      idx == i ? "trait " + name + " uses itself"
                                               : "trait " + name +
                                                     " is declared later; declarations must be "
                                                     "ordered by dependency"),
                            i);
            }
            if (in_closure.insert(idx).second) queue.push_back(idx);
        }
        for (size_t q = 0; q < queue.size(); ++q) {
            int j = queue[q];
            const CodeLiteral* lit = result.table.decls[static_cast<size_t>(j)].literal();
            if (!lit) continue;
            std::vector<std::pair<std::string, Span>> roots;
            collect_type_roots(*lit, roots);
            for (const auto& [name, span] : roots) {
                int k = result.table.index_of(name);
                if (k < 0) {
                    if (options.prelude && is_prelude_type(name)) continue;
                    return fail(make_diag(DiagCode::TypeError, span, "unknown type " + name), i);
                }
                if (k == i) {
                    return fail(
                        make_diag(DiagCode::OrderError, span,
                                  "type " + name +
                                      " refers to the declaration currently being compiled; no "
                                      "valid compilation order exists"),
                        i);
                }
                if (k > i) {
                    return fail(make_diag(DiagCode::TypeError, span,
                                          "type " + name +
                                              " is declared later and has not been compiled yet"),
                                i);
                }
                if (in_closure.insert(k).second) queue.push_back(k);
            }
        }
        std::vector<int> closure(in_closure.begin(), in_closure.end());
        result.demanded[static_cast<size_t>(i)] = closure;
        for (int j : closure) {
            if (verified[static_cast<size_t>(j)]) continue;
            auto diags = hook(view, result.table.decls[static_cast<size_t>(j)], j);
            if (!diags.empty()) return fail(diags.front(), i);
            verified[static_cast<size_t>(j)] = true;
        }
        return true;
    }

    // Maximal policy: verify every prefix declaration that type-checks, then
    // require demanded traits to be among them.
    bool maximal_and_check(int i) {
        const TableView view = view_at(i);
        bool changed = true;
        while (changed) {
            changed = false;
            for (int j = 0; j < i; ++j) {
                if (verified[static_cast<size_t>(j)]) continue;
                if (!result.table.decls[static_cast<size_t>(j)].literal()) continue;
                auto diags = hook(view, result.table.decls[static_cast<size_t>(j)], j);
                if (diags.empty()) {
                    verified[static_cast<size_t>(j)] = true;
                    changed = true;
                }
            }
        }
        for (int j = 0; j < i; ++j) {
            if (verified[static_cast<size_t>(j)])
                result.demanded[static_cast<size_t>(i)].push_back(j);
        }
        std::vector<const CodeExpr*> refs;
        collect_trait_refs(result.table.decls[static_cast<size_t>(i)].body, refs);
        for (const CodeExpr* ref : refs) {
            const std::string& name = std::get<TraitRef>(ref->node).name;
            int idx = result.table.index_of(name);
            if (idx < 0) {
                return fail(make_diag(DiagCode::UnknownTrait, ref->span,
                                      "trait " + name + " is not declared"),
                            i);
            }
            if (idx >= i) {
                return fail(make_diag(DiagCode::OrderError, ref->span,
                                      "trait " + name + " is not compiled yet"),
                            i);
            }
            if (!verified[static_cast<size_t>(idx)]) {
                auto diags = hook(view, result.table.decls[static_cast<size_t>(idx)], idx);
                if (!diags.empty()) return fail(diags.front(), i);
                verified[static_cast<size_t>(idx)] = true;
            }
        }
        return true;
    }

    bool reduce(int i) {
        const TableView view = view_at(i);
        auto& decl = result.table.decls[static_cast<size_t>(i)];
        CodeExprPtr expr = decl.body;
        while (!expr->as_lit()) {
            auto step = step_compose(expr, view);
            if (!step.ok()) return fail(step.error(), i);
            StepResult r = std::move(step).value();
            if (options.record_trace) {
                result.trace.push_back(ComposeStep{i, r.rule, r.path, expr, r.expr});
            }
            expr = r.expr;
        }
        CodeLiteral lit = expr->as_lit()->lit;
        if (decl.is_class()) lit = substitute_this(lit, decl.name);
        decl.body = make_lit_expr(std::move(lit), decl.span);
        return true;
    }

    bool completion_checks(int i) {
        auto& decl = result.table.decls[static_cast<size_t>(i)];
        const CodeLiteral* stored = decl.literal();
        TableView view;
        view.table = &result.table;
        view.prelude = options.prelude;
        view.limit = i + 1;
        view.current = i;
        view.this_binding = decl.is_class() ? nullptr : stored;

        auto diags = consistent_subtype(view.with_this(stored), *stored);
        if (!diags.empty()) return fail(diags.front(), i);
        TypePath self = decl.is_class() ? TypePath{decl.name, decl.span}
                                        : TypePath{std::string(kThisName), decl.span};
        auto cyc = implements_acyclic(view, self, *stored);
        if (!cyc.empty()) return fail(cyc.front(), i);
        return true;
    }

    void run() {
        const int n = static_cast<int>(result.table.decls.size());
        for (int i = 0; i < n; ++i) {
            if (!source_literals_consistent(i)) return;
            bool ok = options.policy == DemandPolicy::DemandDriven ? demand_and_check(i)
                                                                   : maximal_and_check(i);
            if (!ok) return;
            if (!reduce(i)) return;
            if (!completion_checks(i)) return;
        }
        if (options.full_check) {
            for (int i = 0; i < n; ++i) {
                if (verified[static_cast<size_t>(i)]) continue;
                TableView view;
                view.table = &result.table;
                view.prelude = options.prelude;
                view.limit = n;
                view.current = i;
                auto diags = hook(view, result.table.decls[static_cast<size_t>(i)], i);
                if (!diags.empty()) {
                    fail(diags.front(), i);
                    return;
                }
                verified[static_cast<size_t>(i)] = true;
            }
        }
    }
};

}  // namespace

TypecheckHook default_typecheck_hook() {
    return [](const TableView& view, const Declaration& decl, int index) {
        return check_declaration(view, decl, index);
    };
}

CompileResult compile_program(const DeclarationTable& table, const CompileOptions& options,
                              const TypecheckHook& hook) {
    Compiler c(table, options, hook);
    c.run();
    return std::move(c.result);
}

}  // namespace l42mu
