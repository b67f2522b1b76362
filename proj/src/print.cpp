#include "l42mu/print.hpp"

#include <algorithm>
#include <sstream>

namespace l42mu {

namespace {

std::string alias_segment(const std::string& seg) {
    if (seg == "Int") return "int";
    if (seg == "Bool") return "bool";
    if (seg == "Void") return "void";
    return seg;
}

std::string dotted(const std::vector<std::string>& segs) {
    std::string out;
    for (size_t i = 0; i < segs.size(); ++i) {
        if (i) out += '.';
        out += segs[i];
    }
    return out;
}

// Printing context for one declaration: mirrors the parse-time qualification
// rules so every shortened path re-qualifies to the stored one.
struct PrintScope {
    const DeclarationTable* table = nullptr;
    bool prelude = true;
    std::string class_name;  // empty for traits / standalone literals
    std::vector<std::pair<const CodeLiteral*, std::string>> levels;

    TypePath qualify(const TypePath& p) const { return qualify_path_at(p, levels, table, prelude); }

    std::string print(const TypePath& p) const {
        TypePath q = p;
        if (!class_name.empty() && !q.segments.empty() && q.segments.front() == class_name) {
            q.segments.front() = std::string(kThisName);
        }
        if (q.this_rooted()) {
            std::vector<std::string> rest(q.segments.begin() + 1, q.segments.end());
            if (rest.empty()) return std::string(kThisName);
            for (size_t j = 0; j < rest.size(); ++j) {
                TypePath cand{std::vector<std::string>(rest.begin() + j, rest.end())};
                if (qualify(cand) == q) return dotted(cand.segments);
            }
            return std::string(kThisName) + "." + dotted(rest);
        }
        if (q.segments.size() == 1 && prelude && is_prelude_type(q.segments.front()) &&
            (!table || table->index_of(q.segments.front()) < 0)) {
            return alias_segment(q.segments.front());
        }
        return dotted(q.segments);
    }
};

// Expression printing with operator sugar and minimal parentheses.
enum Prec { kOr = 1, kAnd, kCmp, kAdd, kMul, kUnary, kPostfix, kAtom };

struct OpInfo {
    const char* text;
    int prec;
};

const OpInfo* binary_op(const std::string& name) {
    static const std::pair<const char*, OpInfo> table[] = {
        {"add", {"+", kAdd}}, {"sub", {"-", kAdd}},  {"mul", {"*", kMul}}, {"div", {"/", kMul}},
        {"eq", {"==", kCmp}}, {"lt", {"<", kCmp}},   {"and", {"&&", kAnd}}, {"or", {"||", kOr}},
    };
    for (const auto& [n, info] : table)
        if (name == n) return &info;
    return nullptr;
}

std::string print_expr_prec(const Expr& e, int min_prec, const TypePrinter& types);

std::string print_args(const std::vector<ExprPtr>& args, const TypePrinter& types) {
    std::string out = "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += print_expr_prec(*args[i], 0, types);
    }
    out += ")";
    return out;
}

std::string print_expr_prec(const Expr& e, int min_prec, const TypePrinter& types) {
    if (const auto* v = std::get_if<VarExpr>(&e.node)) return v->name;
    if (const auto* i = std::get_if<IntConst>(&e.node)) return std::to_string(i->value);
    if (const auto* b = std::get_if<BoolConst>(&e.node)) return b->value ? "true" : "false";
    if (const auto* s = std::get_if<StaticCallExpr>(&e.node)) {
        return types(s->type) + "." + s->method + print_args(s->args, types);
    }
    const auto& c = std::get<CallExpr>(e.node);
    if (c.args.size() == 1) {
        if (const OpInfo* op = binary_op(c.method)) {
            int left = op->prec == kCmp ? op->prec + 1 : op->prec;
            std::string out = print_expr_prec(*c.receiver, left, types) + " " + op->text + " " +
                              print_expr_prec(*c.args[0], op->prec + 1, types);
            if (op->prec < min_prec) return "(" + out + ")";
            return out;
        }
    }
    if (c.args.empty() && c.method == "not") {
        std::string out = "!" + print_expr_prec(*c.receiver, kUnary, types);
        if (kUnary < min_prec) return "(" + out + ")";
        return out;
    }
    return print_expr_prec(*c.receiver, kPostfix, types) + "." + c.method +
           print_args(c.args, types);
}

std::string sig_text(const MethodSig& sig, const TypePrinter& types) {
    std::string out;
    if (sig.is_static) out += "static ";
    out += "method " + types(sig.return_type) + " " + sig.name + "(";
    for (size_t i = 0; i < sig.params.size(); ++i) {
        if (i) out += ", ";
        out += types(sig.params[i].type) + " " + sig.params[i].name;
    }
    out += ")";
    return out;
}

std::string literal_text(const CodeLiteral& lit, int indent, PrintScope& scope);

std::string member_lines(const CodeLiteral& lit, int indent, PrintScope& scope) {
    std::string pad(static_cast<size_t>(indent), ' ');
    std::vector<const NestedClass*> nested;
    std::vector<const MethodMember*> methods;
    for (const auto& m : lit.members) {
        if (const auto* nc = m.as_nested()) nested.push_back(nc);
        if (const auto* mm = m.as_method()) methods.push_back(mm);
    }
    std::sort(nested.begin(), nested.end(),
              [](const NestedClass* a, const NestedClass* b) { return a->name < b->name; });
    std::sort(methods.begin(), methods.end(), [](const MethodMember* a, const MethodMember* b) {
        if (a->sig.name != b->sig.name) return a->sig.name < b->sig.name;
        return a->sig.arity() < b->sig.arity();
    });

    TypePrinter types = [&scope](const TypePath& p) { return scope.print(p); };
    std::string out;
    for (const NestedClass* nc : nested) {
        scope.levels.emplace_back(nc->body.get(), nc->name);
        out += pad + nc->name + "= " + literal_text(*nc->body, indent, scope) + "\n";
        scope.levels.pop_back();
    }
    for (const MethodMember* mm : methods) {
        out += pad + sig_text(mm->sig, types);
        if (mm->body) out += "{return " + print_expr_prec(*mm->body, 0, types) + ";}";
        out += "\n";
    }
    return out;
}

std::string literal_text(const CodeLiteral& lit, int indent, PrintScope& scope) {
    std::string header = "{";
    if (lit.is_interface) header += "interface";
    std::vector<TypePath> impls = lit.implements;
    std::sort(impls.begin(), impls.end(), path_less);
    impls.erase(std::unique(impls.begin(), impls.end()), impls.end());
    if (!impls.empty()) {
        if (lit.is_interface) header += " ";
        header += "implements ";
        for (size_t i = 0; i < impls.size(); ++i) {
            if (i) header += ", ";
            header += scope.print(impls[i]);
        }
    }
    if (lit.members.empty()) return header + "}";
    std::string out = header + "\n";
    out += member_lines(lit, indent + 2, scope);
    out += std::string(static_cast<size_t>(indent), ' ') + "}";
    return out;
}

PrintScope scope_for(const DeclarationTable* table, bool prelude, const Declaration& decl,
                     const CodeLiteral& root) {
    PrintScope scope;
    scope.table = table;
    scope.prelude = prelude;
    if (decl.is_class()) scope.class_name = decl.name;
    scope.levels.emplace_back(&root, std::string());
    return scope;
}

// Source (possibly unflattened) code-expression rendering.
std::string code_expr_text(const CodeExpr& e, int indent, PrintScope& scope, int min_prec) {
    if (const auto* l = e.as_lit()) {
        PrintScope inner = scope;
        inner.levels.back().first = &l->lit;
        return literal_text(l->lit, indent, inner);
    }
    if (const auto* t = std::get_if<TraitRef>(&e.node)) return t->name;
    if (const auto* r = std::get_if<RenameExpr>(&e.node)) {
        std::string base = code_expr_text(*r->base, indent, scope, kAtom);
        if (!std::holds_alternative<TraitRef>(r->base->node)) base = "(" + base + ")";
        return base + "[rename " + r->from + " into " + r->to + "]";
    }
    if (const auto* s = std::get_if<SuperAsExpr>(&e.node)) {
        std::string base = code_expr_text(*s->base, indent, scope, kAtom);
        if (!std::holds_alternative<TraitRef>(s->base->node)) base = "(" + base + ")";
        std::string arity = s->arity >= 0 ? "/" + std::to_string(s->arity) : "";
        return base + "[super " + s->target + arity + " as " + s->alias + "]";
    }
    const auto& sum = std::get<SumExpr>(e.node);
    std::string out = code_expr_text(*sum.lhs, indent, scope, kAdd) + " + " +
                      code_expr_text(*sum.rhs, indent, scope, kAdd + 1);
    if (kAdd < min_prec) return "(" + out + ")";
    return out;
}

}  // namespace

std::string canonical_print(const DeclarationTable& table, bool prelude) {
    static const CodeLiteral empty_root{};
    std::string out;
    for (const auto& d : table.decls) {
        const CodeLiteral* lit = d.literal();
        PrintScope scope = scope_for(&table, prelude, d, lit ? *lit : empty_root);
        out += d.name + "= ";
        if (lit) {
            out += literal_text(*lit, 0, scope);
        } else {
            out += code_expr_text(*d.body, 0, scope, 0);
        }
        out += "\n";
    }
    return out;
}

std::string canonical_print(const CodeLiteral& lit, bool prelude) {
    PrintScope scope;
    scope.prelude = prelude;
    scope.levels.emplace_back(&lit, std::string());
    return literal_text(lit, 0, scope);
}

std::string print_source(const DeclarationTable& table, bool prelude) {
    return canonical_print(table, prelude);
}

std::string print_type_plain(const TypePath& path) {
    if (path.segments.size() == 1) return alias_segment(path.segments.front());
    return dotted(path.segments);
}

std::string print_expr(const Expr& e, const TypePrinter& types) {
    return print_expr_prec(e, 0, types);
}

std::string print_expr_plain(const Expr& e) {
    return print_expr_prec(e, 0, [](const TypePath& p) { return print_type_plain(p); });
}

std::string print_sig(const MethodSig& sig, const TypePrinter& types) { return sig_text(sig, types); }

}  // namespace l42mu
