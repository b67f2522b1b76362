#include "doctest.h"
#include "helpers.hpp"
#include "l42mu/compose.hpp"
#include "l42mu/parse.hpp"
#include "l42mu/print.hpp"
#include "l42mu/typecheck.hpp"

using namespace l42mu;
using testutil::analyze_corpus;
using testutil::analyze_src;
using testutil::corpus_text;
using testutil::view_of;

namespace {

CodeLiteral lit_of(const std::string& decl_source) {
    auto parsed = parse_program(decl_source);
    REQUIRE(parsed.ok());
    DeclarationTable q = qualify_names(parsed.value());
    return *q.decls[0].literal();
}

}  // namespace

TEST_CASE("sum inlines a reused trait next to new members") {
    CodeLiteral ta = lit_of(
        "ta= {implements IA method int ma(){return Utils.m(this);}}");
    CodeLiteral ext = lit_of("x= {method int mb(){return this.ma();}}");
    auto result = sum_literals(ta, ext);
    REQUIRE(result.ok());
    CHECK(result.value().find_method("ma", 0) != nullptr);
    CHECK(result.value().find_method("mb", 0) != nullptr);
    CHECK(result.value().implements.size() == 1);
}

TEST_CASE("the empty literal is a sum identity") {
    CodeLiteral l = lit_of("x= {method int m(int v){return v;} N= {method int k()}}");
    CodeLiteral empty;
    auto le = sum_literals(l, empty);
    auto el = sum_literals(empty, l);
    REQUIRE(le.ok());
    REQUIRE(el.ok());
    CHECK(canonical_print(le.value()) == canonical_print(l));
    CHECK(canonical_print(el.value()) == canonical_print(l));
}

TEST_CASE("two implemented methods clash") {
    CodeLiteral l1 = lit_of("x= {method int m(){return 1;}}");
    CodeLiteral l2 = lit_of("y= {method int m(){return 2;}}");
    auto result = sum_literals(l1, l2);
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().code == DiagCode::MethodClash);
    CHECK(result.error().message.find("implemented by both") != std::string::npos);
}

TEST_CASE("differing headers clash even when one side is abstract") {
    CodeLiteral l1 = lit_of("x= {method int m(int a)}");
    CodeLiteral l2 = lit_of("y= {method bool m(int a){return true;}}");
    auto result = sum_literals(l1, l2);
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().code == DiagCode::MethodClash);

    // Identical headers merge, keeping the single body.
    CodeLiteral l3 = lit_of("z= {method int m(int a){return a;}}");
    CodeLiteral l4 = lit_of("w= {method int m(int a)}");
    auto merged = sum_literals(l4, l3);
    REQUIRE(merged.ok());
    CHECK_FALSE(merged.value().find_method("m", 1)->is_abstract());
}

TEST_CASE("same-name different-arity methods never clash") {
    CodeLiteral l1 = lit_of("x= {method int m(){return 1;}}");
    CodeLiteral l2 = lit_of("y= {method int m(int a){return a;}}");
    auto result = sum_literals(l1, l2);
    REQUIRE(result.ok());
    CHECK(result.value().find_method("m", 0) != nullptr);
    CHECK(result.value().find_method("m", 1) != nullptr);
}

TEST_CASE("nested classes with the same name compose recursively") {
    CodeLiteral l1 = lit_of("x= {N= {method int a(){return 1;}}}");
    CodeLiteral l2 = lit_of("y= {N= {method int b(){return 2;}}}");
    auto result = sum_literals(l1, l2);
    REQUIRE(result.ok());
    const NestedClass* n = result.value().find_nested("N");
    REQUIRE(n != nullptr);
    CHECK(n->body->find_method("a", 0) != nullptr);
    CHECK(n->body->find_method("b", 0) != nullptr);

    // A nested class composed with a nested interface is a class clash.
    CodeLiteral l3 = lit_of("z= {N= {interface}}");
    auto clash = sum_literals(l1, l3);
    REQUIRE_FALSE(clash.ok());
    CHECK(clash.error().code == DiagCode::ClassClash);
}

TEST_CASE("the num trait merges its renamed state recursively") {
    auto analyzed = analyze_corpus("exp.l42mu");
    REQUIRE(analyzed.ok());
    const CodeLiteral* num = analyzed.compiled.table.find("num")->literal();
    REQUIRE(num != nullptr);
    const NestedClass* n = num->find_nested("Num");
    REQUIRE(n != nullptr);
    CHECK(n->body->implements.size() == 1);          // from the renamed T
    CHECK(n->body->find_method("value", 0) != nullptr);
    CHECK(n->body->find_method("of", 1) != nullptr);
    CHECK(num->find_nested("T") == nullptr);
}

TEST_CASE("rename rewrites the nested class and its uses") {
    CodeLiteral t = lit_of("t= { method B m()  B= { method B mb() } }");
    auto renamed = rename_nested(t, "B", "C");
    REQUIRE(renamed.ok());
    const CodeLiteral& r = renamed.value();
    CHECK(r.find_nested("B") == nullptr);
    const NestedClass* c = r.find_nested("C");
    REQUIRE(c != nullptr);
    CHECK(r.find_method("m", 0)->sig.return_type.str() == "This.C");
    CHECK(c->body->find_method("mb", 0)->sig.return_type.str() == "This.C");
}

TEST_CASE("rename errors") {
    CodeLiteral t = lit_of("t= { B= {} }");
    auto missing = rename_nested(t, "X", "Y");
    REQUIRE_FALSE(missing.ok());

    auto self = rename_nested(t, "B", "B");
    REQUIRE(self.ok());
    CHECK(canonical_print(self.value()) == canonical_print(t));

    CodeLiteral two = lit_of("t= { B= {} C= {} }");
    auto collide = rename_nested(two, "B", "C");
    REQUIRE_FALSE(collide.ok());
}

TEST_CASE("super moves an implementation to a new name") {
    CodeLiteral colored = lit_of(
        "colored= { method Color color()\n"
        "  method This withColor(Color that)\n"
        "  method This merge(This that){\n"
        "    return this.withColor(this.color().mix(that.color()));} }");
    auto extracted = super_extract(colored, "merge", -1, "_1merge");
    REQUIRE(extracted.ok());
    const CodeLiteral& r = extracted.value();
    CHECK(r.find_method("merge", 1)->is_abstract());
    const MethodMember* alias = r.find_method("_1merge", 1);
    REQUIRE(alias != nullptr);
    CHECK_FALSE(alias->is_abstract());
    CHECK(same_header_types(alias->sig, MethodSig{false, "_1merge",
                                                  r.find_method("merge", 1)->sig.params,
                                                  r.find_method("merge", 1)->sig.return_type,
                                                  {}}));
}

TEST_CASE("super on an abstract method is an error") {
    CodeLiteral l = lit_of("x= {method This sum(This that)}");
    auto extracted = super_extract(l, "sum", -1, "_1sum");
    REQUIRE_FALSE(extracted.ok());
    CHECK(extracted.error().message.find("already abstract") != std::string::npos);

    CodeLiteral impl = lit_of("x= {method int sum(){return 1;} method int other(){return 2;}}");
    auto collide = super_extract(impl, "sum", -1, "other");
    REQUIRE_FALSE(collide.ok());

    CodeLiteral overloaded = lit_of(
        "x= {method int f(){return 1;} method int f(int a){return a;}}");
    auto ambiguous = super_extract(overloaded, "f", -1, "g");
    REQUIRE_FALSE(ambiguous.ok());
    auto by_arity = super_extract(overloaded, "f", 0, "g");
    REQUIRE(by_arity.ok());
    CHECK(by_arity.value().find_method("g", 0) != nullptr);
}

TEST_CASE("step_compose replaces trait names by their literals") {
    auto analyzed = analyze_src("ta= {method int ma(){return 2;}}\nA= Use ta", false);
    REQUIRE(analyzed.ok());
    // Re-run one step by hand against the flattened prefix.
    auto parsed = parse_program("ta= {method int ma(){return 2;}}\nA= Use ta");
    DeclarationTable q = qualify_names(parsed.value());
    TableView prefix;
    prefix.table = &q;
    prefix.limit = 1;
    auto step = step_compose(q.decls[1].body, prefix);
    REQUIRE(step.ok());
    CHECK(step.value().rule == ComposeStep::Rule::LookUp);
    CHECK(step.value().path == "/");
    CHECK(step.value().expr->as_lit() != nullptr);
}

TEST_CASE("reduction is left-to-right call-by-value") {
    auto parsed = parse_program("x= {method int a(){return 1;}} + ({method int b(){return 1;}} + {method int c(){return 1;}})");
    REQUIRE(parsed.ok());
    TableView prefix;
    auto step = step_compose(parsed.value().decls[0].body, prefix);
    REQUIRE(step.ok());
    CHECK(step.value().rule == ComposeStep::Rule::Sum);
    CHECK(step.value().path == "/1");  // the inner sum reduces first
}

TEST_CASE("the leftmost invalid sum reports the error") {
    // Both parenthesized sums clash; the left one must win. The two clashes
    // sit on different lines so the spans distinguish them.
    std::string source =
        "x= ({method int m(){return 1;}} + {method int m(){return 2;}})\n"
        " + ({method int k(){return 1;}}\n"
        " + {method int k(){return 2;}})";
    auto parsed = parse_program(source);
    REQUIRE(parsed.ok());
    TableView prefix;
    auto step = step_compose(parsed.value().decls[0].body, prefix);
    REQUIRE_FALSE(step.ok());
    CHECK(step.error().code == DiagCode::MethodClash);
    CHECK(step.error().span.line == 1);
    CHECK(step.error().message.find("m/0") != std::string::npos);
}

TEST_CASE("compile demands only what a declaration needs") {
    auto analyzed = analyze_corpus("ordering_ok.l42mu");
    REQUIRE(analyzed.ok());
    const auto& demanded = analyzed.compiled.demanded;
    // Declarations: ta tc A B C. Generating A (index 2) demands ta only.
    REQUIRE(demanded.size() == 5);
    CHECK(demanded[2] == std::vector<int>{0});
    // Generating C (index 4) demands tc and, through it, A and B.
    CHECK(demanded[4] == std::vector<int>{1, 2, 3});
}

TEST_CASE("the swapped program is a type error at the moved declaration") {
    auto analyzed = analyze_corpus("ordering_swapped.l42mu");
    REQUIRE_FALSE(analyzed.ok());
    CHECK(analyzed.compiled.error->code == DiagCode::TypeError);
    CHECK(analyzed.compiled.error->decl_index == 3);  // C
    CHECK(analyzed.compiled.error->message.find("declared later") != std::string::npos);
}

TEST_CASE("the mutual program is an order error") {
    auto analyzed = analyze_corpus("ordering_mutual.l42mu");
    REQUIRE_FALSE(analyzed.ok());
    CHECK(analyzed.compiled.error->code == DiagCode::OrderError);
    CHECK(analyzed.compiled.error->decl_index == 1);  // A
}

TEST_CASE("unknown traits are reported") {
    auto analyzed = analyze_src("A= Use ghost");
    REQUIRE_FALSE(analyzed.ok());
    CHECK(analyzed.compiled.error->code == DiagCode::UnknownTrait);

    auto later = analyze_src("A= Use t\nt= {method int m(){return 1;}}");
    REQUIRE_FALSE(later.ok());
    CHECK(later.compiled.error->code == DiagCode::OrderError);
}

TEST_CASE("wrong_count counts ill-typed literal operands") {
    TableView view;
    view.prelude = true;

    auto parsed = parse_program(
        "x= {method int ok(){return 1;}} + {method int bad(){return this.n();}}");
    REQUIRE(parsed.ok());
    DeclarationTable q = qualify_names(parsed.value());
    CHECK(wrong_count(view, *q.decls[0].body) == 1);

    auto fine = parse_program("x= {method int ok(){return 1;}}");
    DeclarationTable qf = qualify_names(fine.value());
    CHECK(wrong_count(view, *qf.decls[0].body) == 0);
}

TEST_CASE("flattening repairs the incomplete literal") {
    auto analyzed = analyze_corpus("incomplete_literal.l42mu", true, true);
    REQUIRE(analyzed.ok());
    // The last step of declaration C is the sum that merges the incomplete
    // literal with the trait's members: one wrong literal before, zero after.
    const ComposeStep* final_sum = nullptr;
    for (const auto& step : analyzed.compiled.trace) {
        if (step.decl_index == 1 && step.rule == ComposeStep::Rule::Sum) final_sum = &step;
    }
    REQUIRE(final_sum != nullptr);
    TableView view = view_of(analyzed);
    view.limit = 1;
    CHECK(wrong_count(view, *final_sum->before) == 1);
    CHECK(wrong_count(view, *final_sum->after) == 0);
}

TEST_CASE("flattening erases every composition operator") {
    for (const char* name : {"use_reuse.l42mu", "exp.l42mu", "fcpoint.l42mu"}) {
        auto analyzed = analyze_corpus(name);
        REQUIRE(analyzed.ok());
        CHECK_MESSAGE(table_flattened(analyzed.compiled.table), name);
        std::string printed = canonical_print(analyzed.compiled.table);
        CHECK(printed.find("Use ") == std::string::npos);
        CHECK(printed.find("[rename") == std::string::npos);
        CHECK(printed.find("[super") == std::string::npos);
    }
}

TEST_CASE("the recorded trace reproduces the flattened table") {
    auto analyzed = analyze_corpus("exp.l42mu", true, true);
    REQUIRE(analyzed.ok());
    const auto& table = analyzed.compiled.table;
    for (size_t i = 0; i < table.decls.size(); ++i) {
        const ComposeStep* last = nullptr;
        for (const auto& step : analyzed.compiled.trace) {
            if (step.decl_index == static_cast<int>(i)) last = &step;
        }
        if (!last) continue;  // already a literal in the source
        REQUIRE(last->after->as_lit() != nullptr);
        CodeLiteral lit = last->after->as_lit()->lit;
        if (table.decls[i].is_class()) lit = substitute_this(lit, table.decls[i].name);
        CHECK(canonical_print(lit) == canonical_print(*table.decls[i].literal()));
    }
}

TEST_CASE("compilation is deterministic") {
    auto a = analyze_corpus("exp.l42mu", true, true);
    auto b = analyze_corpus("exp.l42mu", true, true);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(render_compose_trace(a.compiled, a.compiled.table) ==
          render_compose_trace(b.compiled, b.compiled.table));
    CHECK(canonical_print(a.compiled.table) == canonical_print(b.compiled.table));
}

TEST_CASE("flattened output re-flattens to itself") {
    for (const char* name : {"use_reuse.l42mu", "exp.l42mu", "set_bag_v2.l42mu"}) {
        auto analyzed = analyze_corpus(name);
        REQUIRE(analyzed.ok());
        std::string flat = canonical_print(analyzed.compiled.table);
        auto again = analyze_src(flat);
        REQUIRE_MESSAGE(again.ok(), name);
        CHECK_MESSAGE(canonical_print(again.compiled.table) == flat, name);
    }
}

TEST_CASE("flatten does not run the final full check") {
    // The rename-example class is incoherent under the full gate but still
    // flattens (check reports it, flatten does not).
    auto flat = analyze_corpus("rename_example.l42mu", /*full_check=*/false);
    CHECK(flat.ok());
    auto checked = analyze_corpus("rename_example.l42mu", /*full_check=*/true);
    REQUIRE_FALSE(checked.ok());
    CHECK(checked.compiled.error->code == DiagCode::NotCoherent);
}
