#include "l42mu/gen.hpp"

#include <functional>
#include <set>
#include <string>

#include "l42mu/parse.hpp"
#include "l42mu/typecheck.hpp"

namespace l42mu {

namespace {

const std::vector<std::string> kMethodPool = {"m0", "m1", "m2", "m3", "x", "y"};
const std::vector<std::string> kClassPool = {"A", "B", "C", "D", "E"};
const std::vector<std::string> kTraitPool = {"ta", "tb", "tc", "td", "te"};
const std::vector<std::string> kNestedPool = {"N", "P"};

TypePath pick_type(Rng& rng, const std::vector<std::string>& classes) {
    if (!classes.empty() && rng.pct(75)) return TypePath{rng.pick(classes)};
    return TypePath{rng.pick(kClassPool)};
}

ExprPtr gen_body(Rng& rng, const MethodSig& sig) {
    // Small body pool; type errors are deliberately possible.
    if (!sig.is_static && rng.pct(45)) {
        std::vector<ExprPtr> args;
        if (!sig.params.empty() && rng.pct(40)) args.push_back(make_var(sig.params.front().name));
        return make_call(make_var("this"), rng.pick(kMethodPool), std::move(args));
    }
    if (!sig.params.empty()) return make_var(rng.pick(sig.params).name);
    if (!sig.is_static) return make_var("this");
    return make_static_call(TypePath{rng.pick(kClassPool)}, rng.pick(kMethodPool), {});
}

MethodMember gen_method(Rng& rng, const GenConfig& cfg, bool in_interface,
                        const std::vector<std::string>& classes) {
    MethodSig sig;
    sig.name = rng.pick(kMethodPool);
    sig.is_static = !in_interface && rng.pct(20);
    int arity = rng.below(cfg.max_arity + 1);
    for (int i = 0; i < arity; ++i) {
        sig.params.push_back(Param{pick_type(rng, classes), "p" + std::to_string(i)});
    }
    sig.return_type = pick_type(rng, classes);
    bool abstract = in_interface || rng.pct(cfg.pct_abstract);
    ExprPtr body;
    if (!abstract) body = gen_body(rng, sig);
    return MethodMember{std::move(sig), std::move(body)};
}

}  // namespace

CodeLiteral gen_literal(Rng& rng, const GenConfig& cfg, int depth) {
    CodeLiteral lit;
    lit.is_interface = rng.pct(cfg.pct_interface);
    int count = 1 + rng.below(cfg.max_members);
    std::set<std::pair<std::string, int>> method_ids;
    std::set<std::string> nested_names;
    for (int i = 0; i < count; ++i) {
        if (depth < cfg.max_depth && !lit.is_interface && rng.pct(30)) {
            std::string name = rng.pick(kNestedPool);
            if (!nested_names.insert(name).second) continue;
            // Occasionally the interface/implementor pair that makes nested
            // composition interesting.
            if (rng.pct(30) && nested_names.insert("I").second) {
                CodeLiteral iface;
                iface.is_interface = true;
                if (rng.pct(50)) {
                    MethodSig sig;
                    sig.name = "probe";
                    sig.return_type = TypePath{rng.pick(kClassPool)};
                    iface.members.push_back(Member{MethodMember{sig, nullptr}});
                }
                CodeLiteral impl;
                impl.implements.push_back(
                    TypePath{std::vector<std::string>{std::string(kThisName), "I"}});
                for (const auto& m : iface.members) impl.members.push_back(m);
                lit.members.push_back(Member{NestedClass{"I", make_literal(std::move(iface))}});
                lit.members.push_back(Member{NestedClass{name, make_literal(std::move(impl))}});
                continue;
            }
            GenConfig inner = cfg;
            lit.members.push_back(
                Member{NestedClass{name, make_literal(gen_literal(rng, inner, depth + 1))}});
            continue;
        }
        MethodMember m = gen_method(rng, cfg, lit.is_interface, {});
        if (!method_ids.insert({m.sig.name, m.sig.arity()}).second) continue;
        lit.members.push_back(Member{std::move(m)});
    }
    return lit;
}

namespace {

// ---------------------------------------------------------------------------
// Unconstrained tables (Theorem A.2 suite): clashes and type errors welcome.
// ---------------------------------------------------------------------------

// Trait literals that usually type-check on their own (TOP requires demanded
// traits to be well typed): signature types come from declared classes, and
// implemented bodies only reach members of the same literal. A small slice is
// deliberately broken to exercise the abort paths.
CodeLiteral gen_trait_literal(Rng& rng, const GenConfig& cfg,
                              const std::vector<std::string>& classes) {
    CodeLiteral lit;
    int count = 1 + rng.below(cfg.max_members);
    std::set<std::pair<std::string, int>> ids;
    std::vector<MethodSig> own;  // arity-0 members callable through this
    for (int i = 0; i < count; ++i) {
        if (cfg.max_depth > 0 && rng.pct(20)) {
            std::string name = rng.pick(kNestedPool);
            if (lit.find_nested(name)) continue;
            CodeLiteral inner;
            MethodSig sig;
            sig.name = rng.pick(kMethodPool);
            sig.return_type = TypePath{rng.pick(classes)};
            if (rng.pct(40)) inner.is_interface = true;
            inner.members.push_back(Member{MethodMember{sig, nullptr}});
            lit.members.push_back(Member{NestedClass{name, make_literal(std::move(inner))}});
            continue;
        }
        MethodSig sig;
        sig.name = rng.pick(kMethodPool);
        sig.is_static = rng.pct(15);
        int arity = rng.below(cfg.max_arity + 1);
        for (int p = 0; p < arity; ++p) {
            sig.params.push_back(Param{TypePath{rng.pick(classes)}, "p" + std::to_string(p)});
        }
        bool abstract = rng.pct(cfg.pct_abstract);
        ExprPtr body;
        if (abstract) {
            sig.return_type = TypePath{rng.pick(classes)};
        } else if (!sig.params.empty() && rng.pct(50)) {
            const Param& p = rng.pick(sig.params);
            sig.return_type = p.type;
            body = make_var(p.name);
        } else if (!sig.is_static && !own.empty()) {
            const MethodSig& callee = rng.pick(own);
            sig.return_type = callee.return_type;
            body = make_call(make_var("this"), callee.name, {});
        } else {
            abstract = true;
            sig.return_type = TypePath{rng.pick(classes)};
        }
        if (!abstract && !sig.is_static && rng.pct(6)) {
            // Deliberately ill typed: the demanded trait will fail to check.
            body = make_call(make_var("this"), "ghost", {});
        }
        if (!ids.insert({sig.name, sig.arity()}).second) continue;
        if (sig.arity() == 0 && !sig.is_static) own.push_back(sig);
        lit.members.push_back(Member{MethodMember{std::move(sig), std::move(body)}});
    }
    return lit;
}

DeclarationTable gen_table_free(Rng& rng, const GenConfig& cfg) {
    DeclarationTable table;
    std::vector<std::string> traits;
    std::vector<std::string> classes;

    // Base classes so signature types resolve.
    int bases = 1 + rng.below(2);
    for (int i = 0; i < bases; ++i) {
        Declaration d;
        d.name = kClassPool[static_cast<size_t>(i)];
        d.body = make_lit_expr(CodeLiteral{});
        classes.push_back(d.name);
        table.decls.push_back(std::move(d));
    }

    std::set<std::string> used(classes.begin(), classes.end());
    int n = 2 + rng.below(cfg.max_decls - 1);
    for (int i = 0; i < n; ++i) {
        bool is_trait = traits.empty() || rng.pct(60);
        const auto& pool = is_trait ? kTraitPool : kClassPool;
        std::string name = rng.pick(pool);
        if (!used.insert(name).second) continue;

        Declaration d;
        d.name = name;
        bool composite = !traits.empty() && rng.pct(cfg.pct_composition);
        if (!composite) {
            d.body = make_lit_expr(is_trait ? gen_trait_literal(rng, cfg, classes)
                                            : gen_literal(rng, cfg, 0));
        } else {
            std::vector<CodeExprPtr> items;
            int k = 1 + rng.below(3);
            for (int j = 0; j < k; ++j) {
                CodeExprPtr item;
                if (rng.pct(70)) {
                    item = make_code_expr(CodeExpr{TraitRef{rng.pick(traits)}, {}});
                    if (rng.pct(15)) {
                        item = make_code_expr(
                            CodeExpr{RenameExpr{item, rng.pick(kNestedPool), "Q"}, {}});
                    } else if (rng.pct(10)) {
                        item = make_code_expr(
                            CodeExpr{SuperAsExpr{item, rng.pick(kMethodPool), -1, "m9"}, {}});
                    }
                } else {
                    item = make_lit_expr(gen_literal(rng, cfg, 0));
                }
                items.push_back(std::move(item));
            }
            d.body = desugar_use(std::move(items));
        }
        table.decls.push_back(std::move(d));
        (is_trait ? traits : classes).push_back(name);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Typeability-biased tables (Theorem A.1 suite)
// ---------------------------------------------------------------------------

struct RecordPlan {
    std::string name;
    std::vector<Param> params;       // factory parameters
    std::vector<bool> withered;      // per parameter
};

MethodSig state_sig(bool is_static, std::string name, std::vector<Param> params, TypePath ret) {
    MethodSig s;
    s.is_static = is_static;
    s.name = std::move(name);
    s.params = std::move(params);
    s.return_type = std::move(ret);
    return s;
}

std::vector<Member> state_members(const RecordPlan& plan) {
    TypePath self{std::string(kThisName)};
    std::vector<Member> out;
    out.push_back(Member{MethodMember{state_sig(true, "of", plan.params, self), nullptr}});
    for (size_t i = 0; i < plan.params.size(); ++i) {
        const Param& p = plan.params[i];
        out.push_back(Member{MethodMember{state_sig(false, p.name, {}, p.type), nullptr}});
        if (plan.withered[i]) {
            out.push_back(Member{MethodMember{
                state_sig(false, wither_name(p.name), {Param{p.type, "that"}}, self), nullptr}});
        }
    }
    return out;
}

MethodMember gen_typed_method(Rng& rng, const RecordPlan& plan, int ordinal) {
    TypePath self{std::string(kThisName)};
    std::string name = "f" + std::to_string(ordinal);
    int form = rng.below(4);
    size_t pi = static_cast<size_t>(rng.below(static_cast<int>(plan.params.size())));
    const Param& p = plan.params[pi];
    switch (form) {
        case 0:  // return a parameter
            return MethodMember{state_sig(false, name, {Param{p.type, "v"}}, p.type),
                                make_var("v")};
        case 1:  // getter call
            return MethodMember{state_sig(false, name, {}, p.type),
                                make_call(make_var("this"), p.name, {})};
        case 2: {  // wither call when available, else getter
            if (plan.withered[pi]) {
                return MethodMember{
                    state_sig(false, name, {Param{p.type, "v"}}, self),
                    make_call(make_var("this"), wither_name(p.name), {make_var("v")})};
            }
            return MethodMember{state_sig(false, name, {}, p.type),
                                make_call(make_var("this"), p.name, {})};
        }
        default: {  // rebuild through the factory
            std::vector<ExprPtr> args;
            for (const auto& param : plan.params)
                args.push_back(make_call(make_var("this"), param.name, {}));
            return MethodMember{state_sig(false, name, {}, self),
                                make_static_call(TypePath{std::string(kThisName)}, "of",
                                                 std::move(args))};
        }
    }
}

DeclarationTable gen_table_typed(Rng& rng, const GenConfig& cfg) {
    DeclarationTable table;
    std::vector<std::string> classes;

    auto add_class_literal = [&](const std::string& name, CodeLiteral lit) {
        Declaration d;
        d.name = name;
        d.body = make_lit_expr(std::move(lit));
        table.decls.push_back(std::move(d));
        classes.push_back(name);
    };

    // Base classes: zero-argument factories so values always exist.
    int bases = 1 + rng.below(2);
    const std::vector<std::string> base_names = {"Va", "Vb"};
    for (int i = 0; i < bases; ++i) {
        CodeLiteral lit;
        lit.members.push_back(Member{
            MethodMember{state_sig(true, "of", {}, TypePath{std::string(kThisName)}), nullptr}});
        if (rng.pct(40)) {
            lit.members.push_back(Member{MethodMember{
                state_sig(false, "same", {}, TypePath{std::string(kThisName)}), make_var("this")}});
        }
        add_class_literal(base_names[static_cast<size_t>(i)], lit);
    }

    // Optional marker interface implemented by the first record.
    bool with_interface = rng.pct(25);
    MethodSig probe = state_sig(false, "probe", {}, TypePath{classes.front()});
    if (with_interface) {
        CodeLiteral iface;
        iface.is_interface = true;
        iface.members.push_back(Member{MethodMember{probe, nullptr}});
        add_class_literal("Iface", iface);
        classes.pop_back();  // interfaces provide no values
    }

    int records = 1 + rng.below(3);
    const std::vector<std::string> record_names = {"Ra", "Rb", "Rc"};
    const std::vector<std::string> param_names = {"a", "b", "c"};
    for (int r = 0; r < records; ++r) {
        RecordPlan plan;
        plan.name = record_names[static_cast<size_t>(r)];
        int arity = 1 + rng.below(std::min(cfg.max_arity, 3));
        for (int i = 0; i < arity; ++i) {
            plan.params.push_back(
                Param{TypePath{rng.pick(classes)}, param_names[static_cast<size_t>(i)]});
            plan.withered.push_back(rng.pct(70));
        }

        std::vector<Member> impls;
        int extra = rng.below(3);
        for (int i = 0; i < extra; ++i) impls.push_back(Member{gen_typed_method(rng, plan, i)});
        bool implements_iface = with_interface && r == 0;
        if (implements_iface) {
            impls.push_back(Member{MethodMember{
                probe, make_static_call(TypePath{classes.front()}, "of", {})}});
        }

        if (rng.pct(cfg.pct_trait_split) && !impls.empty()) {
            // Each trait is self-contained: full abstract state plus a slice
            // of the implementations; the class may add one incomplete
            // literal that leans on the traits' state.
            std::string t1 = "t" + plan.name + "1";
            std::string t2 = "t" + plan.name + "2";
            size_t half = impls.size() / 2;

            auto trait_decl = [&](const std::string& tname, size_t lo, size_t hi) {
                CodeLiteral lit;
                if (implements_iface) lit.implements.push_back(TypePath{"Iface"});
                lit.members = state_members(plan);
                bool slice_has_probe = false;
                for (size_t i = lo; i < hi; ++i) {
                    const auto* mm = impls[i].as_method();
                    if (mm && mm->sig.name == probe.name && mm->sig.arity() == probe.arity())
                        slice_has_probe = true;
                }
                if (implements_iface && !slice_has_probe)
                    lit.members.push_back(Member{MethodMember{probe, nullptr}});
                for (size_t i = lo; i < hi; ++i) lit.members.push_back(impls[i]);
                Declaration d;
                d.name = tname;
                d.body = make_lit_expr(std::move(lit));
                table.decls.push_back(std::move(d));
            };
            trait_decl(t1, 0, half);
            trait_decl(t2, half, impls.size());

            std::vector<CodeExprPtr> items;
            items.push_back(make_code_expr(CodeExpr{TraitRef{t1}, {}}));
            items.push_back(make_code_expr(CodeExpr{TraitRef{t2}, {}}));
            if (rng.pct(40)) {
                // The relaxation at work: this literal is not well typed on
                // its own, it uses state the traits provide.
                CodeLiteral extra_lit;
                extra_lit.members.push_back(Member{MethodMember{
                    state_sig(false, "peek", {}, plan.params.front().type),
                    make_call(make_var("this"), plan.params.front().name, {})}});
                items.push_back(make_lit_expr(std::move(extra_lit)));
            }
            Declaration d;
            d.name = plan.name;
            d.body = desugar_use(std::move(items));
            table.decls.push_back(std::move(d));
            classes.push_back(plan.name);
        } else {
            CodeLiteral lit;
            if (implements_iface) lit.implements.push_back(TypePath{"Iface"});
            lit.members = state_members(plan);
            for (auto& m : impls) lit.members.push_back(std::move(m));
            add_class_literal(plan.name, lit);
        }
    }
    return table;
}

}  // namespace

DeclarationTable gen_table(const GenConfig& config) {
    Rng rng(config.seed);
    return config.well_typed ? gen_table_typed(rng, config) : gen_table_free(rng, config);
}

// ---------------------------------------------------------------------------
// Well-typed closed expressions over a compiled table
// ---------------------------------------------------------------------------

namespace {

struct ValueSource {
    TypePath type;
    const CodeLiteral* lit;
    MethodSig factory;
};

void collect_factories(const TableView& view, const TypePath& path, const CodeLiteral& lit,
                       std::vector<ValueSource>& out) {
    AbstractStateReport r = abstract_state(path, lit);
    if (!lit.is_interface && r.factory && r.coherent_class()) {
        out.push_back(ValueSource{path, &lit, *r.factory});
    }
    for (const auto& m : lit.members) {
        if (const auto* nc = m.as_nested()) {
            TypePath sub = path;
            sub.segments.push_back(nc->name);
            collect_factories(view, sub, *nc->body, out);
        }
    }
}

}  // namespace

std::vector<ExprPtr> gen_expressions(const TableView& view, std::uint64_t seed, int count) {
    Rng rng(seed);
    std::vector<ValueSource> sources;
    if (view.table) {
        for (const auto& d : view.table->decls) {
            const CodeLiteral* lit = d.literal();
            if (d.is_class() && lit) collect_factories(view, TypePath{d.name}, *lit, sources);
        }
    }
    if (sources.empty()) return {};

    auto source_for = [&](const TypePath& t) -> const ValueSource* {
        for (const auto& s : sources)
            if (s.type == t) return &s;
        return nullptr;
    };

    // Constructible fixpoint: every factory parameter type must itself have
    // a constructible factory. With the prelude on, Int/Bool constants are
    // constructible leaves.
    std::set<std::string> constructible;
    if (view.prelude) {
        constructible.insert("Int");
        constructible.insert("Bool");
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& s : sources) {
            if (constructible.count(s.type.str())) continue;
            bool ok = true;
            for (const auto& p : s.factory.params) {
                if (!constructible.count(p.type.str())) ok = false;
            }
            if (ok) {
                constructible.insert(s.type.str());
                changed = true;
            }
        }
    }
    std::vector<const ValueSource*> usable;
    for (const auto& s : sources)
        if (constructible.count(s.type.str())) usable.push_back(&s);
    if (usable.empty()) return {};

    std::function<ExprPtr(const TypePath&, int)> value = [&](const TypePath& t,
                                                             int depth) -> ExprPtr {
        if (view.prelude && t.segments.size() == 1) {
            if (t.segments.front() == "Int") return make_int(rng.below(100));
            if (t.segments.front() == "Bool") return make_bool(rng.pct(50));
        }
        const ValueSource* s = source_for(t);
        if (!s || depth > 12) return nullptr;
        std::vector<ExprPtr> args;
        for (const auto& p : s->factory.params) {
            ExprPtr a = value(p.type, depth + 1);
            if (!a) return nullptr;
            args.push_back(std::move(a));
        }
        return make_static_call(s->type, s->factory.name, std::move(args));
    };

    std::vector<ExprPtr> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < count && attempts < count * 4) {
        ++attempts;
        const ValueSource* s = usable[static_cast<size_t>(rng.below(static_cast<int>(usable.size())))];
        ExprPtr e = value(s->type, 0);
        if (!e) continue;
        TypePath current = s->type;
        int wraps = rng.below(4);
        for (int w = 0; w < wraps; ++w) {
            const ValueSource* cs = source_for(current);
            if (!cs) break;
            AbstractStateReport r = abstract_state(current, *cs->lit);

            struct Option {
                enum Kind { Getter, Wither, Invoke } kind;
                const MethodSig* sig;
                const std::string* param;
            };
            std::vector<Option> options;
            for (const auto& [p, sig] : r.getters) options.push_back({Option::Getter, &sig, &p});
            for (const auto& [p, sig] : r.withers) {
                if (constructible.count(sig.params.front().type.str()))
                    options.push_back({Option::Wither, &sig, &p});
            }
            std::vector<const MethodMember*> invokables;
            for (const auto& m : cs->lit->members) {
                const auto* mm = m.as_method();
                if (!mm || mm->is_abstract() || mm->sig.is_static) continue;
                bool ok = true;
                for (const auto& p : mm->sig.params)
                    if (!constructible.count(p.type.str())) ok = false;
                if (ok) invokables.push_back(mm);
            }
            for (const auto* mm : invokables) options.push_back({Option::Invoke, &mm->sig, nullptr});
            if (options.empty()) break;
            const Option& opt = options[static_cast<size_t>(rng.below(static_cast<int>(options.size())))];
            std::vector<ExprPtr> args;
            bool built = true;
            for (const auto& p : opt.sig->params) {
                ExprPtr a = value(p.type, 0);
                if (!a) {
                    built = false;
                    break;
                }
                args.push_back(std::move(a));
            }
            if (!built) break;
            e = make_call(std::move(e), opt.sig->name, std::move(args));
            current = opt.sig->return_type;
            if (current.this_rooted()) break;  // should not happen post-substitution
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace l42mu
