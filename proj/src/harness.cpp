#include "l42mu/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "l42mu/eval.hpp"
#include "l42mu/print.hpp"
#include "l42mu/typecheck.hpp"
#include "l42mu/wf.hpp"

namespace l42mu {

Verdict check_theorem_a2(const DeclarationTable& table, bool prelude) {
    CompileOptions opts;
    opts.prelude = prelude;
    opts.record_trace = true;
    CompileResult result = compile_program(table, opts);

    Verdict v;
    for (const auto& step : result.trace) {
        TableView view;
        view.table = &result.table;
        view.prelude = prelude;
        view.limit = step.decl_index;
        int before = wrong_count(view, *step.before);
        int after = wrong_count(view, *step.after);
        ++v.cases;
        if (before < after) {
            std::ostringstream msg;
            msg << "wrong count increased " << before << " -> " << after << " at declaration "
                << table.decls[static_cast<size_t>(step.decl_index)].name << " ("
                << compose_rule_name(step.rule) << " at " << step.path << ")";
            v.pass = false;
            v.detail = msg.str();
            return v;
        }
    }
    return v;
}

Verdict check_theorem_a1(const DeclarationTable& table, int expr_count, long long fuel,
                         std::uint64_t seed, bool prelude) {
    Verdict v;
    CompileOptions opts;
    opts.prelude = prelude;
    CompileResult result = compile_program(table, opts);
    if (!result.ok()) {
        ++v.skipped;
        return v;
    }
    TableView view;
    view.table = &result.table;
    view.prelude = prelude;
    for (const ExprPtr& e : gen_expressions(view, seed, expr_count)) {
        auto typed = type_expr(view, TypeEnv{}, *e);
        if (!typed.ok()) {
            // Generator contract violation: treat as a finding, not a skip.
            v.pass = false;
            v.detail = "generated expression does not type-check: " + print_expr_plain(*e);
            return v;
        }
        RunResult r = run(view, e, fuel);
        ++v.cases;
        if (!r.ok() && r.error->code == DiagCode::Stuck) {
            v.pass = false;
            v.detail = "stuck: " + r.error->message + " in " + print_expr_plain(*e);
            return v;
        }
    }
    return v;
}

Verdict check_algebra(const GenConfig& config, int samples) {
    Verdict v;
    Rng rng(config.seed);
    CodeLiteral empty;

    auto outcome = [](const Expected<CodeLiteral>& r) {
        return r.ok() ? std::string("ok:") + canonical_print(r.value(), false)
                      : std::string("err:") + std::string(diag_code_name(r.error().code));
    };

    for (int i = 0; i < samples; ++i) {
        GenConfig c = config;
        CodeLiteral l1 = gen_literal(rng, c);
        CodeLiteral l2 = gen_literal(rng, c);
        CodeLiteral l3 = gen_literal(rng, c);

        // Commutativity: same literal (canonically) or same diagnostic code.
        auto r12 = sum_literals(l1, l2);
        auto r21 = sum_literals(l2, l1);
        ++v.cases;
        if (outcome(r12) != outcome(r21)) {
            v.pass = false;
            v.detail = "commutativity violated:\n" + canonical_print(l1, false) + "\n+\n" +
                       canonical_print(l2, false);
            return v;
        }

        // Identity with the empty literal.
        if (!l1.is_interface) {
            auto le = sum_literals(l1, empty);
            auto el = sum_literals(empty, l1);
            ++v.cases;
            if (!le.ok() || !el.ok() ||
                canonical_print(le.value(), false) != canonical_print(l1, false) ||
                canonical_print(el.value(), false) != canonical_print(l1, false)) {
                v.pass = false;
                v.detail = "identity violated for:\n" + canonical_print(l1, false);
                return v;
            }
        }

        // Associativity where every intermediate sum succeeds.
        auto left = r12.ok() ? sum_literals(r12.value(), l3) : Expected<CodeLiteral>(r12.error());
        auto r23 = sum_literals(l2, l3);
        auto right = r23.ok() ? sum_literals(l1, r23.value()) : Expected<CodeLiteral>(r23.error());
        if (r12.ok() && r23.ok() && left.ok() && right.ok()) {
            ++v.cases;
            if (canonical_print(left.value(), false) != canonical_print(right.value(), false)) {
                v.pass = false;
                v.detail = "associativity violated:\n" + canonical_print(l1, false) + "\n+\n" +
                           canonical_print(l2, false) + "\n+\n" + canonical_print(l3, false);
                return v;
            }
        } else {
            ++v.skipped;
        }
    }
    return v;
}

Verdict check_state_laws(std::uint64_t seed, int samples) {
    Verdict v;
    Rng rng(seed);
    for (int s = 0; s < samples; ++s) {
        // A tiny table: two value classes and one coherent record over them.
        DeclarationTable table;
        auto value_class = [&](const std::string& name) {
            CodeLiteral lit;
            MethodSig of;
            of.is_static = true;
            of.name = "of";
            of.return_type = TypePath{std::string(kThisName)};
            lit.members.push_back(Member{MethodMember{of, nullptr}});
            Declaration d;
            d.name = name;
            d.body = make_lit_expr(std::move(lit));
            table.decls.push_back(std::move(d));
        };
        value_class("Va");
        value_class("Vb");

        int arity = 1 + rng.below(4);
        const std::vector<std::string> names = {"a", "b", "c", "d"};
        CodeLiteral record;
        MethodSig factory;
        factory.is_static = true;
        factory.name = "of";
        factory.return_type = TypePath{std::string(kThisName)};
        for (int i = 0; i < arity; ++i) {
            factory.params.push_back(
                Param{TypePath{rng.pct(50) ? "Va" : "Vb"}, names[static_cast<size_t>(i)]});
        }
        record.members.push_back(Member{MethodMember{factory, nullptr}});
        for (const auto& p : factory.params) {
            MethodSig getter;
            getter.name = p.name;
            getter.return_type = p.type;
            record.members.push_back(Member{MethodMember{getter, nullptr}});
            MethodSig wither;
            wither.name = wither_name(p.name);
            wither.params.push_back(Param{p.type, "that"});
            wither.return_type = TypePath{std::string(kThisName)};
            record.members.push_back(Member{MethodMember{wither, nullptr}});
        }
        Declaration d;
        d.name = "Rec";
        d.body = make_lit_expr(std::move(record));
        table.decls.push_back(std::move(d));

        CompileOptions opts;
        opts.prelude = false;
        CompileResult compiled = compile_program(table, opts);
        if (!compiled.ok()) {
            v.pass = false;
            v.detail = "state-law table failed to compile: " + compiled.error->message;
            return v;
        }
        TableView view;
        view.table = &compiled.table;
        view.prelude = false;

        auto fresh = [&](const TypePath& t) {
            return make_static_call(t, "of", {});
        };
        std::vector<ExprPtr> tuple;
        for (const auto& p : factory.params) tuple.push_back(fresh(p.type));
        ExprPtr built = make_static_call(TypePath{"Rec"}, "of", tuple);

        auto eval_to = [&](const ExprPtr& e) -> ExprPtr {
            RunResult r = run(view, e, 10000);
            return r.ok() ? r.value : nullptr;
        };

        for (int i = 0; i < arity; ++i) {
            const auto& p = factory.params[static_cast<size_t>(i)];
            ++v.cases;
            ExprPtr got = eval_to(make_call(built, p.name, {}));
            if (!got || !equal_expr(got, tuple[static_cast<size_t>(i)])) {
                v.pass = false;
                v.detail = "getter law violated for parameter " + p.name;
                return v;
            }
            ExprPtr w = fresh(p.type);
            ExprPtr withered = make_call(built, wither_name(p.name), {w});
            ++v.cases;
            got = eval_to(make_call(withered, p.name, {}));
            if (!got || !equal_expr(got, w)) {
                v.pass = false;
                v.detail = "wither-getter law violated for parameter " + p.name;
                return v;
            }
            for (int j = 0; j < arity; ++j) {
                if (j == i) continue;
                const auto& q = factory.params[static_cast<size_t>(j)];
                ++v.cases;
                got = eval_to(make_call(withered, q.name, {}));
                if (!got || !equal_expr(got, tuple[static_cast<size_t>(j)])) {
                    v.pass = false;
                    v.detail = "wither law disturbed parameter " + q.name;
                    return v;
                }
            }
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// shrinking
// ---------------------------------------------------------------------------

namespace {

// Remove the member with the given global ordinal (counting literals of every
// declaration body in pre-order). Returns the declaration table unchanged if
// the ordinal is out of range.
CodeLiteral drop_in_literal(const CodeLiteral& lit, int& ordinal, bool& done) {
    CodeLiteral out = lit;
    std::vector<Member> members;
    for (const auto& m : out.members) {
        if (!done && ordinal == 0) {
            done = true;
            --ordinal;
            continue;
        }
        if (!done) --ordinal;
        if (const auto* nc = m.as_nested()) {
            if (!done) {
                Member copy = m;
                std::get<NestedClass>(copy.node).body =
                    make_literal(drop_in_literal(*nc->body, ordinal, done));
                members.push_back(std::move(copy));
                continue;
            }
        }
        members.push_back(m);
    }
    out.members = std::move(members);
    return out;
}

CodeExprPtr drop_in_expr(const CodeExprPtr& e, int& ordinal, bool& done) {
    if (done || !e) return e;
    if (const auto* l = e->as_lit()) {
        return make_lit_expr(drop_in_literal(l->lit, ordinal, done), e->span);
    }
    if (const auto* s = std::get_if<SumExpr>(&e->node)) {
        CodeExprPtr lhs = drop_in_expr(s->lhs, ordinal, done);
        CodeExprPtr rhs = drop_in_expr(s->rhs, ordinal, done);
        return make_code_expr(CodeExpr{SumExpr{lhs, rhs}, e->span});
    }
    if (const auto* r = std::get_if<RenameExpr>(&e->node)) {
        return make_code_expr(
            CodeExpr{RenameExpr{drop_in_expr(r->base, ordinal, done), r->from, r->to}, e->span});
    }
    if (const auto* sa = std::get_if<SuperAsExpr>(&e->node)) {
        return make_code_expr(CodeExpr{
            SuperAsExpr{drop_in_expr(sa->base, ordinal, done), sa->target, sa->arity, sa->alias},
            e->span});
    }
    return e;
}

int count_members_in_literal(const CodeLiteral& lit) {
    int n = 0;
    for (const auto& m : lit.members) {
        ++n;
        if (const auto* nc = m.as_nested()) n += count_members_in_literal(*nc->body);
    }
    return n;
}

int count_members_in_expr(const CodeExprPtr& e) {
    if (!e) return 0;
    if (const auto* l = e->as_lit()) return count_members_in_literal(l->lit);
    if (const auto* s = std::get_if<SumExpr>(&e->node))
        return count_members_in_expr(s->lhs) + count_members_in_expr(s->rhs);
    if (const auto* r = std::get_if<RenameExpr>(&e->node)) return count_members_in_expr(r->base);
    if (const auto* sa = std::get_if<SuperAsExpr>(&e->node))
        return count_members_in_expr(sa->base);
    return 0;
}

}  // namespace

DeclarationTable shrink_table(const DeclarationTable& table,
                              const std::function<bool(const DeclarationTable&)>& still_fails) {
    DeclarationTable current = table;
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < current.decls.size(); ++i) {
            DeclarationTable candidate = current;
            candidate.decls.erase(candidate.decls.begin() + static_cast<std::ptrdiff_t>(i));
            if (still_fails(candidate)) {
                current = std::move(candidate);
                progress = true;
                break;
            }
        }
        if (progress) continue;
        for (size_t i = 0; i < current.decls.size() && !progress; ++i) {
            int total = count_members_in_expr(current.decls[i].body);
            for (int ord = 0; ord < total; ++ord) {
                DeclarationTable candidate = current;
                int ordinal = ord;
                bool done = false;
                candidate.decls[i].body = drop_in_expr(candidate.decls[i].body, ordinal, done);
                if (done && still_fails(candidate)) {
                    current = std::move(candidate);
                    progress = true;
                    break;
                }
            }
        }
    }
    return current;
}

// ---------------------------------------------------------------------------
// fuzz campaigns
// ---------------------------------------------------------------------------

namespace {

void emit_counterexample(const std::string& out_dir, const std::string& stem,
                         const DeclarationTable& table) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/" + stem + ".l42mu");
    out << print_source(table, false);
}

}  // namespace

FuzzSummary fuzz_a2(std::uint64_t seed, int count, const std::string& out_dir) {
    FuzzSummary summary;
    long long checked_steps = 0;
    for (int k = 0; k < count; ++k) {
        GenConfig cfg;
        cfg.seed = seed + static_cast<std::uint64_t>(k);
        DeclarationTable table = gen_table(cfg);
        ++summary.tables;
        Verdict v = check_theorem_a2(table);
        checked_steps += v.cases;
        if (!v.pass) {
            ++summary.failures;
            DeclarationTable small = shrink_table(
                table, [](const DeclarationTable& t) { return !check_theorem_a2(t).pass; });
            emit_counterexample(out_dir, "a2_seed" + std::to_string(seed + k), small);
            if (summary.detail.empty()) summary.detail = v.detail;
        }

        // Demand-driven vs. maximal-prefix divergence rate (expected zero).
        CompileOptions demand;
        demand.prelude = false;
        CompileResult r = compile_program(table, demand);
        if (!r.ok() &&
            (r.error->code == DiagCode::TypeError || r.error->code == DiagCode::OrderError)) {
            CompileOptions maximal = demand;
            maximal.policy = DemandPolicy::MaximalPrefix;
            if (compile_program(table, maximal).ok()) ++summary.divergence;
        }
    }
    std::ostringstream d;
    d << checked_steps << " compose steps checked";
    if (summary.detail.empty()) {
        summary.detail = d.str();
    }
    return summary;
}

FuzzSummary fuzz_a1(std::uint64_t seed, int count, int exprs_per_table, long long fuel,
                    const std::string& out_dir) {
    FuzzSummary summary;
    long long runs = 0;
    std::uint64_t next_seed = seed;
    int attempts = 0;
    while (summary.tables < count && attempts < count * 8) {
        ++attempts;
        GenConfig cfg;
        cfg.seed = next_seed++;
        cfg.well_typed = true;
        DeclarationTable table = gen_table(cfg);
        Verdict v = check_theorem_a1(table, exprs_per_table, fuel, cfg.seed * 31 + 7);
        if (v.skipped) {
            ++summary.skipped;
            continue;
        }
        ++summary.tables;
        runs += v.cases;
        if (!v.pass) {
            ++summary.failures;
            emit_counterexample(out_dir, "a1_seed" + std::to_string(cfg.seed), table);
            if (summary.detail.empty()) summary.detail = v.detail;
        }
    }
    if (summary.detail.empty()) {
        std::ostringstream d;
        d << runs << " expressions run";
        summary.detail = d.str();
    }
    return summary;
}

FuzzSummary fuzz_algebra(std::uint64_t seed, int count, const std::string& out_dir) {
    (void)out_dir;
    FuzzSummary summary;
    GenConfig cfg;
    cfg.seed = seed;
    Verdict v = check_algebra(cfg, count);
    summary.tables = v.cases;
    summary.skipped = v.skipped;
    if (!v.pass) {
        summary.failures = 1;
        summary.detail = v.detail;
    } else {
        std::ostringstream d;
        d << v.cases << " law instances checked";
        summary.detail = d.str();
    }
    return summary;
}

}  // namespace l42mu
