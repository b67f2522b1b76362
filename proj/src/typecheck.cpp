#include "l42mu/typecheck.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "l42mu/print.hpp"

namespace l42mu {

namespace {

Diagnostic type_error(Span span, std::string msg) {
    return make_diag(DiagCode::TypeError, span, std::move(msg));
}

bool subtype_rec(const TableView& view, const TypePath& t1, const TypePath& t2,
                 std::set<std::string>& seen) {
    if (t1 == t2) return true;
    if (!seen.insert(t1.str()).second) return false;
    const CodeLiteral* lit = view.resolve(t1);
    if (!lit) return false;
    for (const auto& t : lit->implements) {
        if (subtype_rec(view, t, t2, seen)) return true;
    }
    return false;
}

}  // namespace

bool subtype(const TableView& view, const TypePath& t1, const TypePath& t2) {
    std::set<std::string> seen;
    return subtype_rec(view, t1, t2, seen);
}

Expected<TypePath> type_expr(const TableView& view, const TypeEnv& env, const Expr& e) {
    if (const auto* v = std::get_if<VarExpr>(&e.node)) {
        const TypePath* t = env.lookup(v->name);
        if (!t) return type_error(e.span, "variable " + v->name + " is not in scope");
        return *t;
    }
    if (std::get_if<IntConst>(&e.node)) {
        if (!view.prelude) return type_error(e.span, "integer literals require the prelude");
        return TypePath{"Int", e.span};
    }
    if (std::get_if<BoolConst>(&e.node)) {
        if (!view.prelude) return type_error(e.span, "boolean literals require the prelude");
        return TypePath{"Bool", e.span};
    }

    const TypePath* recv_type = nullptr;
    TypePath recv_storage;
    const std::vector<ExprPtr>* args = nullptr;
    const std::string* method = nullptr;
    bool static_call = false;
    if (const auto* s = std::get_if<StaticCallExpr>(&e.node)) {
        recv_storage = s->type;
        recv_type = &recv_storage;
        args = &s->args;
        method = &s->method;
        static_call = true;
    } else {
        const auto& c = std::get<CallExpr>(e.node);
        auto rt = type_expr(view, env, *c.receiver);
        if (!rt.ok()) return rt;
        recv_storage = std::move(rt).value();
        recv_type = &recv_storage;
        args = &c.args;
        method = &c.method;
    }

    const CodeLiteral* lit = view.resolve(*recv_type);
    if (!lit) return view.resolve_failure(static_call ? *recv_type : TypePath{recv_type->segments, e.span});
    int arity = static_cast<int>(args->size());
    const MethodMember* member = lit->find_method(*method, arity);
    if (!member) {
        return type_error(e.span, "type " + recv_type->str() + " has no method " + *method + "/" +
                                      std::to_string(arity));
    }
    if (static_call && !member->sig.is_static) {
        return type_error(e.span, "method " + *method + " of " + recv_type->str() + " is not static");
    }
    if (!static_call && member->sig.is_static) {
        return type_error(e.span,
                          "static method " + *method + " of " + recv_type->str() +
                              " cannot be called on an instance");
    }
    for (int i = 0; i < arity; ++i) {
        auto at = type_expr(view, env, *(*args)[static_cast<size_t>(i)]);
        if (!at.ok()) return at;
        const TypePath& expected = member->sig.params[static_cast<size_t>(i)].type;
        if (!subtype(view, at.value(), expected)) {
            return type_error((*args)[static_cast<size_t>(i)]->span,
                              "argument " + std::to_string(i + 1) + " of " + *method + " has type " +
                                  at.value().str() + ", expected " + expected.str());
        }
    }
    return member->sig.return_type;
}

std::vector<Diagnostic> check_method(const TableView& view, const TypePath& self,
                                     const MethodMember& m) {
    std::vector<Diagnostic> out;
    auto check_type = [&](const TypePath& t) {
        if (!view.resolve(t)) out.push_back(view.resolve_failure(t));
    };
    for (const auto& p : m.sig.params) check_type(p.type);
    check_type(m.sig.return_type);
    if (!out.empty() || m.is_abstract()) return out;

    TypeEnv env;
    if (!m.sig.is_static) env.bindings.emplace_back("this", self);
    for (const auto& p : m.sig.params) env.bindings.emplace_back(p.name, p.type);
    auto rt = type_expr(view, env, *m.body);
    if (!rt.ok()) {
        out.push_back(rt.error());
        return out;
    }
    if (!subtype(view, rt.value(), m.sig.return_type)) {
        out.push_back(type_error(m.body->span, "body of " + m.sig.name + " has type " +
                                                   rt.value().str() + ", expected " +
                                                   m.sig.return_type.str()));
    }
    return out;
}

std::vector<Diagnostic> check_literal(const TableView& view, const TypePath& self,
                                      const CodeLiteral& lit) {
    std::vector<Diagnostic> out;
    for (const auto& m : lit.members) {
        if (const auto* mm = m.as_method()) {
            for (auto d : check_method(view, self, *mm)) out.push_back(std::move(d));
        } else {
            const auto& nc = std::get<NestedClass>(m.node);
            TypePath sub = self;
            sub.segments.push_back(nc.name);
            for (auto d : check_literal(view, sub, *nc.body)) out.push_back(std::move(d));
        }
    }
    return out;
}

std::string wither_name(const std::string& param_name) {
    std::string out = "with" + param_name;
    out[4] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[4])));
    return out;
}

std::string wither_param(const std::string& method_name) {
    if (method_name.size() <= 4 || method_name.rfind("with", 0) != 0) return {};
    std::string out = method_name.substr(4);
    out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
    return out;
}

AbstractStateReport abstract_state(const TypePath& nominal, const CodeLiteral& lit) {
    AbstractStateReport report;
    std::vector<const MethodMember*> abstract_statics;
    std::vector<const MethodMember*> abstract_instance;
    for (const auto& m : lit.members) {
        const auto* mm = m.as_method();
        if (!mm || !mm->is_abstract()) continue;
        report.has_abstract = true;
        (mm->sig.is_static ? abstract_statics : abstract_instance).push_back(mm);
    }
    if (abstract_statics.size() == 1 && abstract_statics.front()->sig.return_type == nominal) {
        report.factory = abstract_statics.front()->sig;
    } else {
        for (const auto* mm : abstract_statics) report.unclassified.push_back(mm->sig);
    }
    for (const auto* mm : abstract_instance) {
        if (report.factory) {
            const MethodSig& f = *report.factory;
            bool classified = false;
            if (mm->sig.arity() == 0) {
                for (const auto& p : f.params) {
                    if (p.name == mm->sig.name && mm->sig.return_type == p.type) {
                        report.getters.emplace_back(p.name, mm->sig);
                        classified = true;
                        break;
                    }
                }
            } else if (mm->sig.arity() == 1) {
                std::string param = wither_param(mm->sig.name);
                if (!param.empty()) {
                    for (const auto& p : f.params) {
                        if (p.name == param && mm->sig.params.front().type == p.type &&
                            mm->sig.return_type == nominal) {
                            report.withers.emplace_back(p.name, mm->sig);
                            classified = true;
                            break;
                        }
                    }
                }
            }
            if (!classified) report.unclassified.push_back(mm->sig);
        } else {
            report.unclassified.push_back(mm->sig);
        }
    }
    return report;
}

bool coherent(const TypePath& nominal, const CodeLiteral& lit) {
    for (const auto& m : lit.members) {
        if (const auto* nc = m.as_nested()) {
            TypePath sub = nominal;
            sub.segments.push_back(nc->name);
            if (!coherent(sub, *nc->body)) return false;
        }
    }
    if (lit.is_interface) return true;
    return abstract_state(nominal, lit).coherent_class();
}

namespace {

void explain_rec(const TypePath& nominal, const CodeLiteral& lit, std::ostringstream& out) {
    out << nominal.str() << ": ";
    if (lit.is_interface) {
        out << "interface (coherent)\n";
    } else {
        AbstractStateReport r = abstract_state(nominal, lit);
        out << (r.coherent_class() ? "coherent" : "not coherent") << "\n";
        if (r.factory) {
            out << "  factory: " << r.factory->name << "/" << r.factory->arity() << " (";
            for (size_t i = 0; i < r.factory->params.size(); ++i) {
                if (i) out << ", ";
                out << print_type_plain(r.factory->params[i].type) << " "
                    << r.factory->params[i].name;
            }
            out << ")\n";
        } else if (r.has_abstract) {
            out << "  factory: none\n";
        }
        for (const auto& [p, sig] : r.getters) out << "  getter " << sig.name << "() -> " << p << "\n";
        for (const auto& [p, sig] : r.withers)
            out << "  wither " << sig.name << "(..) -> " << p << "\n";
        for (const auto& sig : r.unclassified) {
            out << "  unclassified: " << (sig.is_static ? "static " : "") << sig.name << "/"
                << sig.arity() << "\n";
        }
    }
    for (const auto& m : lit.members) {
        if (const auto* nc = m.as_nested()) {
            TypePath sub = nominal;
            sub.segments.push_back(nc->name);
            explain_rec(sub, *nc->body, out);
        }
    }
}

// First incoherence found, for the NotCoherent message.
std::string incoherence_reason(const TypePath& nominal, const CodeLiteral& lit) {
    for (const auto& m : lit.members) {
        if (const auto* nc = m.as_nested()) {
            TypePath sub = nominal;
            sub.segments.push_back(nc->name);
            std::string inner = incoherence_reason(sub, *nc->body);
            if (!inner.empty()) return inner;
        }
    }
    if (lit.is_interface) return {};
    AbstractStateReport r = abstract_state(nominal, lit);
    if (r.coherent_class()) return {};
    std::ostringstream msg;
    msg << "class " << nominal.str() << " is not coherent: ";
    if (!r.factory) {
        if (r.unclassified.size() == 1 && r.unclassified.front().is_static) {
            msg << "the abstract static method " << r.unclassified.front().name
                << " does not return " << nominal.str();
        } else {
            bool multi_static = false;
            int statics = 0;
            for (const auto& s : r.unclassified) statics += s.is_static ? 1 : 0;
            multi_static = statics > 1;
            if (multi_static) {
                msg << "there is more than one abstract static method";
            } else {
                msg << "there is no factory for its abstract methods";
            }
        }
        return msg.str();
    }
    const MethodSig& bad = r.unclassified.front();
    msg << "abstract method " << bad.name << "/" << bad.arity()
        << " is not a getter or wither of the factory";
    if (bad.arity() == 1 && bad.return_type == TypePath{"Void"}) {
        bool param_like = false;
        for (const auto& p : r.factory->params) param_like = param_like || p.name == bad.name;
        if (param_like) msg << " (setters are not supported)";
    }
    return msg.str();
}

}  // namespace

std::string explain_coherence(const TypePath& nominal, const CodeLiteral& lit) {
    std::ostringstream out;
    explain_rec(nominal, lit, out);
    return out.str();
}

std::vector<Diagnostic> check_declaration(const TableView& view, const Declaration& decl,
                                          int index) {
    std::vector<Diagnostic> out;
    const CodeLiteral* lit = decl.literal();
    if (!lit) {
        out.push_back(make_diag(DiagCode::TypeError, decl.span,
                                "declaration " + decl.name + " is not flattened", index));
        return out;
    }
    if (decl.is_class()) {
        CodeLiteral substituted = substitute_this(*lit, decl.name);
        TypePath self{decl.name, decl.span};
        TableView v = view.with_this(nullptr);
        out = check_literal(v, self, substituted);
        if (out.empty() && !coherent(self, substituted)) {
            out.push_back(make_diag(DiagCode::NotCoherent, decl.span,
                                    incoherence_reason(self, substituted)));
        }
    } else {
        TableView v = view.with_this(lit);
        out = check_literal(v, TypePath{std::string(kThisName), decl.span}, *lit);
    }
    for (auto& d : out) d.decl_index = index;
    return out;
}

}  // namespace l42mu
