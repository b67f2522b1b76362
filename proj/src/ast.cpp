#include "l42mu/ast.hpp"

#include <algorithm>
#include <sstream>

namespace l42mu {

std::string_view diag_code_name(DiagCode code) {
    switch (code) {
        case DiagCode::MethodClash: return "method-clash";
        case DiagCode::ClassClash: return "class-clash";
        case DiagCode::ImplementsClash: return "implements-clash";
        case DiagCode::UnknownTrait: return "unknown-trait";
        case DiagCode::NotWellFormed: return "not-well-formed";
        case DiagCode::NotCoherent: return "not-coherent";
        case DiagCode::TypeError: return "type-error";
        case DiagCode::OrderError: return "order-error";
        case DiagCode::Stuck: return "stuck";
        case DiagCode::FuelExhausted: return "fuel-exhausted";
    }
    return "unknown";
}

bool is_class_name(std::string_view text) {
    return !text.empty() && text.front() >= 'A' && text.front() <= 'Z';
}

std::string TypePath::str() const {
    std::string out;
    for (size_t i = 0; i < segments.size(); ++i) {
        if (i) out += '.';
        out += segments[i];
    }
    return out;
}

bool operator==(const TypePath& a, const TypePath& b) { return a.segments == b.segments; }

bool path_less(const TypePath& a, const TypePath& b) { return a.segments < b.segments; }

ExprPtr make_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
ExprPtr make_var(std::string name, Span s) { return make_expr(Expr{VarExpr{std::move(name)}, s}); }
ExprPtr make_call(ExprPtr recv, std::string method, std::vector<ExprPtr> args, Span s) {
    return make_expr(Expr{CallExpr{std::move(recv), std::move(method), std::move(args)}, s});
}
ExprPtr make_static_call(TypePath type, std::string method, std::vector<ExprPtr> args, Span s) {
    return make_expr(Expr{StaticCallExpr{std::move(type), std::move(method), std::move(args)}, s});
}
ExprPtr make_int(std::int64_t v, Span s) { return make_expr(Expr{IntConst{v}, s}); }
ExprPtr make_bool(bool v, Span s) { return make_expr(Expr{BoolConst{v}, s}); }

bool equal_expr(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* v = std::get_if<VarExpr>(&a.node)) {
        return v->name == std::get<VarExpr>(b.node).name;
    }
    if (const auto* c = std::get_if<CallExpr>(&a.node)) {
        const auto& d = std::get<CallExpr>(b.node);
        if (c->method != d.method || c->args.size() != d.args.size()) return false;
        if (!equal_expr(c->receiver, d.receiver)) return false;
        for (size_t i = 0; i < c->args.size(); ++i)
            if (!equal_expr(c->args[i], d.args[i])) return false;
        return true;
    }
    if (const auto* s = std::get_if<StaticCallExpr>(&a.node)) {
        const auto& t = std::get<StaticCallExpr>(b.node);
        if (s->type != t.type || s->method != t.method || s->args.size() != t.args.size())
            return false;
        for (size_t i = 0; i < s->args.size(); ++i)
            if (!equal_expr(s->args[i], t.args[i])) return false;
        return true;
    }
    if (const auto* i = std::get_if<IntConst>(&a.node)) {
        return i->value == std::get<IntConst>(b.node).value;
    }
    return std::get<BoolConst>(a.node).value == std::get<BoolConst>(b.node).value;
}

bool equal_expr(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return equal_expr(*a, *b);
}

bool same_signature(const MethodSig& a, const MethodSig& b) {
    if (!same_header_types(a, b)) return false;
    for (size_t i = 0; i < a.params.size(); ++i)
        if (a.params[i].name != b.params[i].name) return false;
    return true;
}

bool same_header_types(const MethodSig& a, const MethodSig& b) {
    if (a.is_static != b.is_static || a.name != b.name) return false;
    if (a.params.size() != b.params.size()) return false;
    if (a.return_type != b.return_type) return false;
    for (size_t i = 0; i < a.params.size(); ++i)
        if (a.params[i].type != b.params[i].type) return false;
    return true;
}

const MethodMember* CodeLiteral::find_method(std::string_view name, int arity) const {
    for (const auto& m : members) {
        if (const auto* mm = m.as_method()) {
            if (mm->sig.name == name && mm->sig.arity() == arity) return mm;
        }
    }
    return nullptr;
}

std::vector<const MethodMember*> CodeLiteral::methods_named(std::string_view name) const {
    std::vector<const MethodMember*> out;
    for (const auto& m : members) {
        if (const auto* mm = m.as_method()) {
            if (mm->sig.name == name) out.push_back(mm);
        }
    }
    return out;
}

const NestedClass* CodeLiteral::find_nested(std::string_view name) const {
    for (const auto& m : members) {
        if (const auto* nc = m.as_nested()) {
            if (nc->name == name) return nc;
        }
    }
    return nullptr;
}

LiteralPtr make_literal(CodeLiteral lit) { return std::make_shared<const CodeLiteral>(std::move(lit)); }

CodeExprPtr make_code_expr(CodeExpr e) { return std::make_shared<const CodeExpr>(std::move(e)); }
CodeExprPtr make_lit_expr(CodeLiteral lit, Span s) {
    return make_code_expr(CodeExpr{LitExpr{std::move(lit)}, s});
}

const CodeLiteral* Declaration::literal() const {
    if (!body) return nullptr;
    if (const auto* l = body->as_lit()) return &l->lit;
    return nullptr;
}

int DeclarationTable::index_of(std::string_view name) const {
    for (size_t i = 0; i < decls.size(); ++i)
        if (decls[i].name == name) return static_cast<int>(i);
    return -1;
}

const Declaration* DeclarationTable::find(std::string_view name) const {
    int i = index_of(name);
    return i < 0 ? nullptr : &decls[static_cast<size_t>(i)];
}

bool table_flattened(const DeclarationTable& table) {
    for (const auto& d : table.decls)
        if (!d.literal()) return false;
    return true;
}

// ---------------------------------------------------------------------------
// This substitution
// ---------------------------------------------------------------------------

namespace {

TypePath subst_path(const TypePath& p, const std::string& class_name) {
    if (!p.this_rooted()) return p;
    TypePath out = p;
    out.segments.front() = class_name;
    return out;
}

ExprPtr subst_expr(const ExprPtr& e, const std::string& class_name) {
    if (!e) return e;
    if (const auto* c = std::get_if<CallExpr>(&e->node)) {
        std::vector<ExprPtr> args;
        args.reserve(c->args.size());
        for (const auto& a : c->args) args.push_back(subst_expr(a, class_name));
        return make_call(subst_expr(c->receiver, class_name), c->method, std::move(args), e->span);
    }
    if (const auto* s = std::get_if<StaticCallExpr>(&e->node)) {
        std::vector<ExprPtr> args;
        args.reserve(s->args.size());
        for (const auto& a : s->args) args.push_back(subst_expr(a, class_name));
        return make_static_call(subst_path(s->type, class_name), s->method, std::move(args), e->span);
    }
    return e;
}

}  // namespace

CodeLiteral substitute_this(const CodeLiteral& lit, const std::string& class_name) {
    CodeLiteral out = lit;
    for (auto& t : out.implements) t = subst_path(t, class_name);
    for (auto& m : out.members) {
        if (auto* mm = std::get_if<MethodMember>(&m.node)) {
            for (auto& p : mm->sig.params) p.type = subst_path(p.type, class_name);
            mm->sig.return_type = subst_path(mm->sig.return_type, class_name);
            mm->body = subst_expr(mm->body, class_name);
        } else {
            auto& nc = std::get<NestedClass>(m.node);
            nc.body = make_literal(substitute_this(*nc.body, class_name));
        }
    }
    return out;
}

TypePath qualify_path_at(const TypePath& path, const ScopeLevels& levels,
                         const DeclarationTable* table, bool prelude) {
    if (path.segments.empty() || path.this_rooted()) return path;
    const std::string& root = path.segments.front();
    for (size_t k = levels.size(); k-- > 0;) {
        if (levels[k].first && levels[k].first->find_nested(root)) {
            TypePath out;
            out.span = path.span;
            out.segments.push_back(std::string(kThisName));
            for (size_t j = 1; j <= k; ++j) out.segments.push_back(levels[j].second);
            for (const auto& s : path.segments) out.segments.push_back(s);
            return out;
        }
    }
    if (table && table->index_of(root) >= 0) return path;
    if (prelude && is_prelude_type(root)) return path;
    TypePath out;
    out.span = path.span;
    out.segments.push_back(std::string(kThisName));
    for (const auto& s : path.segments) out.segments.push_back(s);
    return out;
}

// ---------------------------------------------------------------------------
// Prelude
// ---------------------------------------------------------------------------

namespace {

MethodSig sig(bool is_static, std::string name, std::vector<Param> params, std::string ret) {
    MethodSig s;
    s.is_static = is_static;
    s.name = std::move(name);
    s.params = std::move(params);
    s.return_type = TypePath{std::move(ret)};
    return s;
}

Member abstract_method(MethodSig s) { return Member{MethodMember{std::move(s), nullptr}}; }

Declaration intrinsic_class(std::string name, std::vector<Member> members) {
    CodeLiteral lit;
    lit.members = std::move(members);
    Declaration d;
    d.name = std::move(name);
    d.body = make_lit_expr(std::move(lit));
    return d;
}

DeclarationTable build_prelude() {
    DeclarationTable t;
    auto binop = [](std::string name, std::string operand, std::string ret) {
        return abstract_method(sig(false, std::move(name), {Param{TypePath{std::move(operand)}, "that"}},
                                   std::move(ret)));
    };
    t.decls.push_back(intrinsic_class(
        "Int", {binop("add", "Int", "Int"), binop("sub", "Int", "Int"), binop("mul", "Int", "Int"),
                binop("div", "Int", "Int"), binop("eq", "Int", "Bool"), binop("lt", "Int", "Bool")}));
    t.decls.push_back(intrinsic_class(
        "Bool", {binop("and", "Bool", "Bool"), binop("or", "Bool", "Bool"),
                 abstract_method(sig(false, "not", {}, "Bool"))}));
    t.decls.push_back(intrinsic_class("Void", {abstract_method(sig(true, "unit", {}, "Void"))}));
    return t;
}

}  // namespace

const DeclarationTable& prelude_table() {
    static const DeclarationTable table = build_prelude();
    return table;
}

bool is_prelude_type(std::string_view name) {
    return name == "Int" || name == "Bool" || name == "Void";
}

// ---------------------------------------------------------------------------
// Lookup
// ---------------------------------------------------------------------------

const CodeLiteral* TableView::resolve_top(std::string_view name) const {
    if (table) {
        int i = table->index_of(name);
        if (i >= 0) {
            if (limit >= 0 && i >= limit) return nullptr;
            return table->decls[static_cast<size_t>(i)].literal();
        }
    }
    if (prelude && is_prelude_type(name)) {
        return prelude_table().find(name)->literal();
    }
    return nullptr;
}

const CodeLiteral* TableView::resolve(const TypePath& path) const {
    if (path.segments.empty()) return nullptr;
    const CodeLiteral* cur = nullptr;
    size_t start = 1;
    if (path.this_rooted()) {
        cur = this_binding;
    } else {
        cur = resolve_top(path.segments.front());
    }
    for (size_t i = start; cur && i < path.segments.size(); ++i) {
        const NestedClass* nc = cur->find_nested(path.segments[i]);
        cur = nc ? nc->body.get() : nullptr;
    }
    return cur;
}

Diagnostic TableView::resolve_failure(const TypePath& path) const {
    std::ostringstream msg;
    if (path.this_rooted() && !this_binding) {
        msg << "type " << path.str() << " uses This outside of a trait context";
        return make_diag(DiagCode::TypeError, path.span, msg.str());
    }
    if (!path.this_rooted() && table) {
        int i = table->index_of(path.segments.front());
        if (i >= 0 && limit >= 0 && i >= limit) {
            if (i == current) {
                msg << "type " << path.segments.front()
                    << " refers to the declaration currently being compiled; no valid "
                       "compilation order exists";
                return make_diag(DiagCode::OrderError, path.span, msg.str());
            }
            msg << "type " << path.segments.front()
                << " is declared later and has not been compiled yet";
            return make_diag(DiagCode::TypeError, path.span, msg.str());
        }
    }
    msg << "unknown type " << path.str();
    return make_diag(DiagCode::TypeError, path.span, msg.str());
}

const CodeLiteral* lookup_type(const TableView& view, const TypePath& path) {
    return view.resolve(path);
}

const MethodMember* lookup_member(const TableView& view, const TypePath& path,
                                  std::string_view name, int arity) {
    const CodeLiteral* lit = view.resolve(path);
    return lit ? lit->find_method(name, arity) : nullptr;
}

}  // namespace l42mu
