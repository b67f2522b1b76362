#include "l42mu/wf.hpp"

#include <functional>
#include <set>
#include <sstream>
#include <string>

namespace l42mu {

namespace {

void note(std::vector<Diagnostic>& out, DiagCode code, Span span, std::string msg) {
    out.push_back(make_diag(code, span, std::move(msg)));
}

void collect_vars(const ExprPtr& e, std::vector<const Expr*>& vars) {
    if (!e) return;
    if (std::holds_alternative<VarExpr>(e->node)) {
        vars.push_back(e.get());
        return;
    }
    if (const auto* c = std::get_if<CallExpr>(&e->node)) {
        collect_vars(c->receiver, vars);
        for (const auto& a : c->args) collect_vars(a, vars);
    }
    if (const auto* s = std::get_if<StaticCallExpr>(&e->node)) {
        for (const auto& a : s->args) collect_vars(a, vars);
    }
}

void wf_method(const MethodMember& m, bool in_interface, const std::string& where,
               std::vector<Diagnostic>& out) {
    std::set<std::string> seen;
    for (const auto& p : m.sig.params) {
        if (p.name == "this") {
            note(out, DiagCode::NotWellFormed, m.sig.span,
                 "parameter of " + where + m.sig.name + " is named this");
        }
        if (!seen.insert(p.name).second) {
            note(out, DiagCode::NotWellFormed, m.sig.span,
                 "duplicate parameter " + p.name + " in " + where + m.sig.name);
        }
    }
    if (in_interface) {
        if (!m.is_abstract()) {
            note(out, DiagCode::NotWellFormed, m.sig.span,
                 "interface method " + where + m.sig.name + " has a body");
        }
        if (m.sig.is_static) {
            note(out, DiagCode::NotWellFormed, m.sig.span,
                 "interface declares static method " + where + m.sig.name);
        }
    }
    if (m.body) {
        std::vector<const Expr*> vars;
        collect_vars(m.body, vars);
        for (const Expr* v : vars) {
            const std::string& name = std::get<VarExpr>(v->node).name;
            if (name == "this") {
                if (m.sig.is_static) {
                    note(out, DiagCode::NotWellFormed, v->span,
                         "this is not in scope in static method " + where + m.sig.name);
                }
                continue;
            }
            bool bound = false;
            for (const auto& p : m.sig.params) bound = bound || p.name == name;
            if (!bound) {
                note(out, DiagCode::NotWellFormed, v->span,
                     "variable " + name + " is not in scope in " + where + m.sig.name);
            }
        }
    }
}

void wf_literal_rec(const CodeLiteral& lit, const std::string& where,
                    std::vector<Diagnostic>& out) {
    std::set<std::pair<std::string, int>> method_ids;
    std::set<std::string> nested_names;
    for (const auto& m : lit.members) {
        if (const auto* mm = m.as_method()) {
            if (!method_ids.insert({mm->sig.name, mm->sig.arity()}).second) {
                note(out, DiagCode::NotWellFormed, mm->sig.span,
                     "duplicate method " + where + mm->sig.name + "/" +
                         std::to_string(mm->sig.arity()));
            }
            wf_method(*mm, lit.is_interface, where, out);
        } else {
            const auto& nc = std::get<NestedClass>(m.node);
            if (nc.name == kThisName) {
                note(out, DiagCode::NotWellFormed, nc.span, "a nested class is called This");
            }
            if (!nested_names.insert(nc.name).second) {
                note(out, DiagCode::NotWellFormed, nc.span,
                     "duplicate nested class " + where + nc.name);
            }
            wf_literal_rec(*nc.body, where + nc.name + ".", out);
        }
    }
}

void for_each_literal(const CodeExprPtr& e,
                      const std::function<void(const CodeLiteral&)>& fn) {
    if (!e) return;
    if (const auto* l = e->as_lit()) {
        fn(l->lit);
        return;
    }
    if (const auto* s = std::get_if<SumExpr>(&e->node)) {
        for_each_literal(s->lhs, fn);
        for_each_literal(s->rhs, fn);
    }
    if (const auto* r = std::get_if<RenameExpr>(&e->node)) for_each_literal(r->base, fn);
    if (const auto* sa = std::get_if<SuperAsExpr>(&e->node)) for_each_literal(sa->base, fn);
}

}  // namespace

std::vector<Diagnostic> wf_literal(const CodeLiteral& lit) {
    std::vector<Diagnostic> out;
    wf_literal_rec(lit, "", out);
    return out;
}

std::vector<Diagnostic> wf_program(const DeclarationTable& table, bool prelude) {
    std::vector<Diagnostic> out;
    std::set<std::string> names;
    for (const auto& d : table.decls) {
        if (d.name == kThisName) {
            note(out, DiagCode::NotWellFormed, d.span, "This cannot be declared at top level");
        }
        if (prelude && is_prelude_type(d.name)) {
            note(out, DiagCode::NotWellFormed, d.span,
                 d.name + " is reserved by the prelude (compile with --no-prelude to define it)");
        }
        if (!names.insert(d.name).second) {
            note(out, DiagCode::NotWellFormed, d.span, "duplicate top-level name " + d.name);
        }
        for_each_literal(d.body, [&](const CodeLiteral& lit) {
            for (auto diag : wf_literal(lit)) {
                out.push_back(std::move(diag));
            }
        });
    }
    return out;
}

// ---------------------------------------------------------------------------
// consistentSubtype
// ---------------------------------------------------------------------------

namespace {

void consistent_rec(const TableView& view, const CodeLiteral& lit, const std::string& where,
                    std::vector<Diagnostic>& out) {
    for (const auto& t : lit.implements) {
        const CodeLiteral* target = view.resolve(t);
        if (!target) {
            note(out, DiagCode::ImplementsClash, t.span,
                 "implemented interface " + t.str() + " cannot be resolved" +
                     (where.empty() ? "" : " (in nested class " + where + ")"));
            continue;
        }
        if (!target->is_interface) {
            note(out, DiagCode::ImplementsClash, t.span,
                 t.str() + " is implemented but is not an interface" +
                     (where.empty() ? "" : " (in nested class " + where + ")"));
            continue;
        }
        for (const auto& m : target->members) {
            const auto* req = m.as_method();
            if (!req) continue;
            const MethodMember* have = lit.find_method(req->sig.name, req->sig.arity());
            if (!have) {
                note(out, DiagCode::ImplementsClash, lit.span,
                     (where.empty() ? "literal" : "nested class " + where) + " implements " +
                         t.str() + " but lacks method " + req->sig.name + "/" +
                         std::to_string(req->sig.arity()));
            } else if (!same_header_types(have->sig, req->sig)) {
                note(out, DiagCode::ImplementsClash, have->sig.span,
                     "method " + req->sig.name + " does not match its declaration in " + t.str());
            }
        }
    }
    for (const auto& m : lit.members) {
        if (const auto* nc = m.as_nested()) {
            consistent_rec(view, *nc->body, where.empty() ? nc->name : where + "." + nc->name, out);
        }
    }
}

}  // namespace

std::vector<Diagnostic> consistent_subtype(const TableView& view, const CodeLiteral& outer) {
    std::vector<Diagnostic> out;
    consistent_rec(view, outer, "", out);
    return out;
}

std::vector<Diagnostic> implements_acyclic(const TableView& view, const TypePath& self,
                                           const CodeLiteral& lit) {
    std::vector<Diagnostic> out;
    std::set<std::string> done;

    // DFS over nominal paths along implements edges.
    std::function<bool(const TypePath&, std::vector<std::string>&)> visit =
        [&](const TypePath& path, std::vector<std::string>& stack) -> bool {
        std::string key = path.str();
        for (const auto& s : stack) {
            if (s == key) {
                std::ostringstream msg;
                msg << "circular implements chain through " << key;
                note(out, DiagCode::ImplementsClash, path.span, msg.str());
                return false;
            }
        }
        if (done.count(key)) return true;
        const CodeLiteral* target = view.resolve(path);
        if (!target) return true;  // resolvability reported elsewhere
        stack.push_back(key);
        for (const auto& t : target->implements) {
            if (!visit(t, stack)) {
                stack.pop_back();
                return false;
            }
        }
        stack.pop_back();
        done.insert(key);
        return true;
    };

    std::function<void(const TypePath&, const CodeLiteral&)> walk = [&](const TypePath& path,
                                                                        const CodeLiteral& l) {
        std::vector<std::string> stack;
        visit(path, stack);
        for (const auto& m : l.members) {
            if (const auto* nc = m.as_nested()) {
                TypePath sub = path;
                sub.segments.push_back(nc->name);
                walk(sub, *nc->body);
            }
        }
    };
    walk(self, lit);
    return out;
}

// ---------------------------------------------------------------------------
// Interface-member auto-import (default mode)
// ---------------------------------------------------------------------------

namespace {

// Resolve an implements path from source: This-rooted against the operand
// root, otherwise against literal-bodied top-level declarations. Returns the
// target plus the top-level root name for This re-rooting (empty if local).
struct SourceIface {
    const CodeLiteral* lit = nullptr;
    std::string top_root;
};

SourceIface resolve_source_iface(const TypePath& t, const CodeLiteral& root,
                                 const DeclarationTable& table) {
    const CodeLiteral* cur = nullptr;
    std::string top;
    size_t i = 1;
    if (t.this_rooted()) {
        cur = &root;
    } else {
        const Declaration* d = table.find(t.segments.front());
        if (!d) return {};
        cur = d->literal();
        top = d->name;
    }
    for (; cur && i < t.segments.size(); ++i) {
        const NestedClass* nc = cur->find_nested(t.segments[i]);
        cur = nc ? nc->body.get() : nullptr;
    }
    return {cur, top};
}

TypePath reroot_this(const TypePath& p, const std::string& top) {
    if (top.empty() || !p.this_rooted()) return p;
    TypePath out = p;
    out.segments.front() = top;
    return out;
}

// One normalization sweep over a literal; true if anything was inserted.
bool normalize_literal(CodeLiteral& lit, const CodeLiteral& root, const DeclarationTable& table) {
    bool changed = false;
    for (const auto& t : lit.implements) {
        SourceIface iface = resolve_source_iface(t, root, table);
        if (!iface.lit || !iface.lit->is_interface) continue;
        for (const auto& m : iface.lit->members) {
            const auto* req = m.as_method();
            if (!req) continue;
            if (lit.find_method(req->sig.name, req->sig.arity())) continue;
            MethodSig imported = req->sig;
            imported.return_type = reroot_this(imported.return_type, iface.top_root);
            for (auto& p : imported.params) p.type = reroot_this(p.type, iface.top_root);
            lit.members.push_back(Member{MethodMember{std::move(imported), nullptr}});
            changed = true;
        }
    }
    for (auto& m : lit.members) {
        if (auto* nc = std::get_if<NestedClass>(&m.node)) {
            CodeLiteral inner = *nc->body;
            if (normalize_literal(inner, root, table)) {
                nc->body = make_literal(std::move(inner));
                changed = true;
            }
        }
    }
    return changed;
}

CodeExprPtr normalize_code_expr(const CodeExprPtr& e, const DeclarationTable& table,
                                bool& changed) {
    if (const auto* l = e->as_lit()) {
        CodeLiteral lit = l->lit;
        // The operand literal is its own This root.
        bool local = false;
        do {
            local = normalize_literal(lit, lit, table);
            changed = changed || local;
        } while (local);
        return make_lit_expr(std::move(lit), e->span);
    }
    if (const auto* s = std::get_if<SumExpr>(&e->node)) {
        return make_code_expr(CodeExpr{SumExpr{normalize_code_expr(s->lhs, table, changed),
                                               normalize_code_expr(s->rhs, table, changed)},
                                       e->span});
    }
    if (const auto* r = std::get_if<RenameExpr>(&e->node)) {
        return make_code_expr(
            CodeExpr{RenameExpr{normalize_code_expr(r->base, table, changed), r->from, r->to},
                     e->span});
    }
    if (const auto* sa = std::get_if<SuperAsExpr>(&e->node)) {
        return make_code_expr(CodeExpr{SuperAsExpr{normalize_code_expr(sa->base, table, changed),
                                                   sa->target, sa->arity, sa->alias},
                                       e->span});
    }
    return e;
}

}  // namespace

DeclarationTable normalize_interface_imports(const DeclarationTable& table, bool /*prelude*/) {
    DeclarationTable out = table;
    // Fixpoint over the whole table so interface-extends-interface chains and
    // cross-declaration imports settle.
    bool changed = true;
    int guard = 0;
    while (changed && guard++ < 64) {
        changed = false;
        for (auto& d : out.decls) d.body = normalize_code_expr(d.body, out, changed);
    }
    return out;
}

}  // namespace l42mu
