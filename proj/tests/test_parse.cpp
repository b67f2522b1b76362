#include "doctest.h"
#include "helpers.hpp"
#include "l42mu/parse.hpp"
#include "l42mu/print.hpp"

using namespace l42mu;
using testutil::corpus_text;

TEST_CASE("tokenize the Use declaration") {
    auto toks = tokenize("A=Use ta");
    REQUIRE(toks.ok());
    const auto& t = toks.value();
    REQUIRE(t.size() == 5);  // includes End
    CHECK(t[0].kind == TokKind::Ident);
    CHECK(t[0].text == "A");
    CHECK(t[1].kind == TokKind::Eq);
    CHECK(t[2].kind == TokKind::KwUse);
    CHECK(t[3].kind == TokKind::Ident);
    CHECK(t[3].text == "ta");
}

TEST_CASE("tokenize empty input and rename brackets") {
    auto empty = tokenize("");
    REQUIRE(empty.ok());
    CHECK(empty.value().size() == 1);
    CHECK(empty.value()[0].kind == TokKind::End);

    auto ren = tokenize("t[rename B into C]");
    REQUIRE(ren.ok());
    bool has_rename = false, has_into = false;
    for (const auto& tok : ren.value()) {
        has_rename = has_rename || tok.kind == TokKind::KwRename;
        has_into = has_into || tok.kind == TokKind::KwInto;
    }
    CHECK(has_rename);
    CHECK(has_into);
}

TEST_CASE("tokenize rejects illegal characters and skips comments") {
    CHECK_FALSE(tokenize("A = #").ok());
    auto toks = tokenize("A= {} // trailing comment\n");
    REQUIRE(toks.ok());
    CHECK(toks.value().size() == 5);
}

TEST_CASE("the four-declaration interface program parses") {
    auto parsed = parse_program(
        "IA={interface method int ma()}\n"
        "Utils={static method int m(IA a){return a.ma();}}\n"
        "ta={implements IA\n  method int ma(){return Utils.m(this);}}\n"
        "A=Use ta\n");
    REQUIRE(parsed.ok());
    CHECK(parsed.value().decls.size() == 4);
    CHECK(parsed.value().decls[0].name == "IA");
    CHECK(parsed.value().decls[3].name == "A");
    CHECK(parsed.value().decls[3].is_class());
    CHECK(std::holds_alternative<TraitRef>(parsed.value().decls[3].body->node));
}

TEST_CASE("Use with a literal tail parses to a sum") {
    auto parsed = parse_program("B=Use ta, { method int mb(){return this.ma();} }");
    REQUIRE(parsed.ok());
    const auto& body = parsed.value().decls[0].body;
    const auto* sum = std::get_if<SumExpr>(&body->node);
    REQUIRE(sum != nullptr);
    CHECK(std::holds_alternative<TraitRef>(sum->lhs->node));
    CHECK(sum->rhs->as_lit() != nullptr);
}

TEST_CASE("missing declaration body is a syntax error") {
    auto parsed = parse_program("X=");
    REQUIRE_FALSE(parsed.ok());
    CHECK(parsed.error().code == DiagCode::NotWellFormed);
}

TEST_CASE("class names cannot appear in composition expressions") {
    auto parsed = parse_program("B= Use A");
    REQUIRE_FALSE(parsed.ok());
    CHECK(parsed.error().message.find("class names") != std::string::npos);
}

TEST_CASE("desugar_use left-associates") {
    auto items = [](std::initializer_list<const char*> names) {
        std::vector<CodeExprPtr> out;
        for (const char* n : names) out.push_back(make_code_expr(CodeExpr{TraitRef{n}, {}}));
        return out;
    };

    CodeExprPtr three = desugar_use(items({"pointSum", "pointMul", "pointDiv"}));
    const auto* outer = std::get_if<SumExpr>(&three->node);
    REQUIRE(outer != nullptr);
    const auto* inner = std::get_if<SumExpr>(&outer->lhs->node);
    REQUIRE(inner != nullptr);
    CHECK(std::get<TraitRef>(inner->lhs->node).name == "pointSum");
    CHECK(std::get<TraitRef>(inner->rhs->node).name == "pointMul");
    CHECK(std::get<TraitRef>(outer->rhs->node).name == "pointDiv");

    CodeExprPtr one = desugar_use(items({"set"}));
    CHECK(std::get<TraitRef>(one->node).name == "set");

    CodeExprPtr lit = desugar_use({make_lit_expr(CodeLiteral{})});
    CHECK(lit->as_lit() != nullptr);
}

TEST_CASE("desugar_use preserves the item multiset") {
    auto parsed = parse_program(corpus_text("exp.l42mu"));
    REQUIRE(parsed.ok());
    // Count trait references and literals per declaration against the source
    // structure: sums only reshape, never duplicate or drop.
    const auto& example = parsed.value().decls.back();
    int traits = 0;
    std::function<void(const CodeExprPtr&)> walk = [&](const CodeExprPtr& e) {
        if (std::holds_alternative<TraitRef>(e->node)) ++traits;
        if (const auto* s = std::get_if<SumExpr>(&e->node)) {
            walk(s->lhs);
            walk(s->rhs);
        }
    };
    walk(example.body);
    CHECK(traits == 4);  // evalNum, evalPlus, doubleNum, doublePlus
}

TEST_CASE("qualify_names rewrites sibling references to This paths") {
    auto parsed = parse_program("eval= { Exp= {interface method int eval()}  T= {implements Exp} }");
    REQUIRE(parsed.ok());
    DeclarationTable q = qualify_names(parsed.value());
    const CodeLiteral* lit = q.decls[0].literal();
    const NestedClass* t = lit->find_nested("T");
    REQUIRE(t != nullptr);
    REQUIRE(t->body->implements.size() == 1);
    CHECK(t->body->implements[0].str() == "This.Exp");
}

TEST_CASE("qualify_names leaves literals without nested classes unchanged") {
    auto parsed = parse_program("Utils= {static method int m(Utils u){return 1;}}");
    REQUIRE(parsed.ok());
    DeclarationTable q = qualify_names(parsed.value());
    CHECK(canonical_print(q) == canonical_print(parsed.value()));
}

TEST_CASE("qualify_names on the plus trait matches hand qualification") {
    auto parsed = parse_program(corpus_text("exp.l42mu"));
    REQUIRE(parsed.ok());
    DeclarationTable q = qualify_names(parsed.value());
    const Declaration* plus = q.find("plus");
    REQUIRE(plus != nullptr);
    const auto* sum = std::get_if<SumExpr>(&plus->body->node);
    REQUIRE(sum != nullptr);
    const CodeLiteral& operand = sum->rhs->as_lit()->lit;
    const NestedClass* p = operand.find_nested("Plus");
    REQUIRE(p != nullptr);
    const MethodMember* left = p->body->find_method("left", 0);
    REQUIRE(left != nullptr);
    CHECK(left->sig.return_type.str() == "This.Exp");  // presumed member of the composition
    const MethodMember* of = p->body->find_method("of", 2);
    REQUIRE(of != nullptr);
    CHECK(of->sig.return_type.str() == "This.Plus");  // sibling nested class
    CHECK(of->sig.params[0].type.str() == "This.Exp");

    const Declaration* num = q.find("num");
    const auto* nsum = std::get_if<SumExpr>(&num->body->node);
    const MethodMember* value =
        nsum->rhs->as_lit()->lit.find_nested("Num")->body->find_method("value", 0);
    CHECK(value->sig.return_type.str() == "Int");  // prelude types stay absolute
}

TEST_CASE("qualify_names is idempotent") {
    for (const char* name : {"exp.l42mu", "fcpoint.l42mu", "use_reuse.l42mu"}) {
        auto parsed = parse_program(corpus_text(name));
        REQUIRE(parsed.ok());
        DeclarationTable once = qualify_names(parsed.value());
        DeclarationTable twice = qualify_names(once);
        CHECK_MESSAGE(canonical_print(once) == canonical_print(twice), name);
    }
}

TEST_CASE("parse then print then parse is stable from the second iteration") {
    for (const char* name : {"exp.l42mu", "point_algebra.l42mu", "set_bag_v2.l42mu"}) {
        auto parsed = parse_program(corpus_text(name));
        REQUIRE(parsed.ok());
        std::string p1 = canonical_print(qualify_names(parsed.value()));
        auto reparsed = parse_program(p1);
        REQUIRE(reparsed.ok());
        std::string p2 = canonical_print(qualify_names(reparsed.value()));
        auto again = parse_program(p2);
        REQUIRE(again.ok());
        std::string p3 = canonical_print(qualify_names(again.value()));
        CHECK_MESSAGE(p2 == p3, name);
    }
}

TEST_CASE("expression parsing handles precedence and sugar") {
    auto e = parse_expression("1+2*3");
    REQUIRE(e.ok());
    const auto* add = std::get_if<CallExpr>(&e.value()->node);
    REQUIRE(add != nullptr);
    CHECK(add->method == "add");
    const auto* mul = std::get_if<CallExpr>(&add->args[0]->node);
    REQUIRE(mul != nullptr);
    CHECK(mul->method == "mul");

    auto cmp = parse_expression("!true && 1 < 2");
    REQUIRE(cmp.ok());
    CHECK(std::get<CallExpr>(cmp.value()->node).method == "and");

    auto chain = parse_expression("Point.of(1,2).withX(5).x()");
    REQUIRE(chain.ok());
    CHECK(std::get<CallExpr>(chain.value()->node).method == "x");
}
