#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "l42mu/compose.hpp"
#include "l42mu/gen.hpp"
#include "l42mu/parse.hpp"
#include "l42mu/print.hpp"
#include "l42mu/typecheck.hpp"
#include "l42mu/wf.hpp"

using namespace l42mu;
using testutil::analyze_corpus;
using testutil::analyze_src;
using testutil::literal_of;
using testutil::view_of;

namespace {

TypePath tp(std::initializer_list<std::string> segs) {
    return TypePath{std::vector<std::string>(segs)};
}

}  // namespace

TEST_CASE("subtype is reflexive and follows implements") {
    auto analyzed = analyze_corpus("use_reuse.l42mu");
    REQUIRE(analyzed.ok());
    TableView view = view_of(analyzed);
    CHECK(subtype(view, tp({"Utils"}), tp({"Utils"})));
    CHECK(subtype(view, tp({"A"}), tp({"IA"})));
    CHECK(subtype(view, tp({"B"}), tp({"IA"})));
    CHECK_FALSE(subtype(view, tp({"IA"}), tp({"A"})));
}

TEST_CASE("reuse induces no subtyping between Bag and Set") {
    auto analyzed = analyze_corpus("set_bag_v1.l42mu");
    REQUIRE(analyzed.ok());
    TableView view = view_of(analyzed);
    CHECK_FALSE(subtype(view, tp({"Bag"}), tp({"Set"})));
    CHECK_FALSE(subtype(view, tp({"Set"}), tp({"Bag"})));
}

TEST_CASE("subtype is transitive over interface chains") {
    auto analyzed = analyze_src(
        "I1= {interface}\n"
        "I2= {interface implements I1}\n"
        "C= {implements I2}\n");
    REQUIRE(analyzed.ok());
    TableView view = view_of(analyzed);
    CHECK(subtype(view, tp({"C"}), tp({"I1"})));
}

TEST_CASE("circular implements chains are rejected") {
    auto analyzed = analyze_src(
        "I1= {interface implements I2}\n"
        "I2= {interface implements I1}\n");
    REQUIRE_FALSE(analyzed.ok());
    CHECK(analyzed.compiled.error->code == DiagCode::ImplementsClash);
}

TEST_CASE("check_declaration accepts the reuse trait given its interface") {
    auto analyzed = analyze_corpus("use_reuse.l42mu");
    REQUIRE(analyzed.ok());
    TableView view = view_of(analyzed);
    const Declaration* ta = analyzed.compiled.table.find("ta");
    CHECK(check_declaration(view, *ta, 2).empty());
}

TEST_CASE("without the interface the trait body is ill-typed") {
    // this has type This, which is not a subtype of IA without implements.
    auto parsed = parse_program(
        "IA= {interface method int ma()}\n"
        "Utils= {static method int m(IA a){return a.ma();}}\n"
        "ta= {method int ma(){return Utils.m(this);}}\n");
    REQUIRE(parsed.ok());
    DeclarationTable table = qualify_names(parsed.value());
    TableView view;
    view.table = &table;
    auto diags = check_declaration(view, *table.find("ta"), 2);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags[0].code == DiagCode::TypeError);
}

TEST_CASE("non-coherent composition is rejected by check") {
    auto analyzed = analyze_corpus("cpoint_incoherent.l42mu");
    REQUIRE_FALSE(analyzed.ok());
    CHECK(analyzed.compiled.error->code == DiagCode::NotCoherent);
    CHECK(analyzed.compiled.error->message.find("color") != std::string::npos);
}

TEST_CASE("check_literal types bodies against merged members") {
    auto analyzed = analyze_corpus("use_reuse.l42mu");
    REQUIRE(analyzed.ok());
    TableView view = view_of(analyzed);
    CHECK(check_literal(view, tp({"B"}), literal_of(analyzed, "B")).empty());
    CHECK(check_literal(view, tp({"X"}), CodeLiteral{}).empty());
}

TEST_CASE("calling an unprovided method is a type error") {
    auto analyzed = analyze_src("t1= {method int n(){return this.m()+1;}}");
    REQUIRE_FALSE(analyzed.ok());
    CHECK(analyzed.compiled.error->code == DiagCode::TypeError);
    CHECK(analyzed.compiled.error->message.find("no method m/0") != std::string::npos);
}

TEST_CASE("check_method handles abstract methods and static this") {
    TableView view;
    view.prelude = true;

    MethodMember abstract_method{MethodSig{false, "x", {}, tp({"Int"}), {}}, nullptr};
    CHECK(check_method(view, tp({"P"}), abstract_method).empty());

    MethodMember static_this{MethodSig{true, "s", {}, tp({"Int"}), {}}, make_var("this")};
    auto diags = check_method(view, tp({"P"}), static_this);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags[0].code == DiagCode::TypeError);
}

TEST_CASE("the point sum body types at This") {
    auto analyzed = analyze_corpus("point_algebra.l42mu");
    REQUIRE(analyzed.ok());
    TableView view = view_of(analyzed);
    const Declaration* ps = analyzed.compiled.table.find("pointSum");
    CHECK(check_declaration(view, *ps, 1).empty());
}

TEST_CASE("type_expr follows the typing rules") {
    auto analyzed = analyze_corpus("use_reuse.l42mu");
    REQUIRE(analyzed.ok());
    TableView view = view_of(analyzed);

    TypeEnv env;
    env.bindings.emplace_back("x", tp({"IA"}));
    auto var = type_expr(view, env, *make_var("x"));
    REQUIRE(var.ok());
    CHECK(var.value() == tp({"IA"}));

    TypeEnv self_env;
    self_env.bindings.emplace_back("this", tp({"A"}));
    auto call = type_expr(view, self_env, *make_static_call(tp({"Utils"}), "m", {make_var("this")}));
    REQUIRE(call.ok());
    CHECK(call.value() == tp({"Int"}));

    TypeEnv b;
    b.bindings.emplace_back("this", tp({"B"}));
    auto unknown = type_expr(view, b, *make_call(make_var("this"), "nothere", {}));
    REQUIRE_FALSE(unknown.ok());
    CHECK(unknown.error().code == DiagCode::TypeError);

    auto bad_arg = type_expr(view, b, *make_static_call(tp({"Utils"}), "m", {make_int(3)}));
    REQUIRE_FALSE(bad_arg.ok());
    CHECK(bad_arg.error().message.find("argument 1") != std::string::npos);
}

TEST_CASE("abstract_state classifies the point algebra") {
    auto analyzed = analyze_corpus("point_algebra.l42mu");
    REQUIRE(analyzed.ok());
    AbstractStateReport r = abstract_state(tp({"PointAlgebra"}), literal_of(analyzed, "PointAlgebra"));
    REQUIRE(r.factory.has_value());
    CHECK(r.factory->name == "of");
    CHECK(r.factory->arity() == 2);
    REQUIRE(r.getters.size() == 2);
    CHECK(r.getters[0].first == "x");
    CHECK(r.getters[1].first == "y");
    CHECK(r.withers.empty());
    CHECK(r.unclassified.empty());
    CHECK(r.coherent_class());
}

TEST_CASE("abstract_state classifies withers") {
    auto analyzed = analyze_corpus("point_wither.l42mu");
    REQUIRE(analyzed.ok());
    AbstractStateReport r = abstract_state(tp({"Point"}), literal_of(analyzed, "Point"));
    REQUIRE(r.withers.size() == 2);
    CHECK(r.withers[0].first == "x");
    CHECK(r.withers[0].second.name == "withX");
    CHECK(r.withers[1].first == "y");
    CHECK(r.coherent_class());
}

TEST_CASE("a class with no abstract methods is coherent without a factory") {
    auto analyzed = analyze_corpus("use_reuse.l42mu");
    REQUIRE(analyzed.ok());
    AbstractStateReport r = abstract_state(tp({"Utils"}), literal_of(analyzed, "Utils"));
    CHECK_FALSE(r.factory.has_value());
    CHECK_FALSE(r.has_abstract);
    CHECK(r.coherent_class());
    CHECK(coherent(tp({"Utils"}), literal_of(analyzed, "Utils")));
}

TEST_CASE("coherence verdicts across the point corpus") {
    auto palg = analyze_corpus("point_algebra.l42mu");
    REQUIRE(palg.ok());
    CHECK(coherent(tp({"PointAlgebra"}), literal_of(palg, "PointAlgebra")));

    auto iface = analyze_corpus("use_reuse.l42mu");
    CHECK(coherent(tp({"IA"}), literal_of(iface, "IA")));  // interfaces are coherent

    // The failed composition flattens (without the full check) to an
    // incoherent literal.
    auto cfail = analyze_corpus("cpoint_incoherent.l42mu", /*full_check=*/false);
    REQUIRE(cfail.ok());
    CHECK_FALSE(coherent(tp({"CPoint"}), literal_of(cfail, "CPoint")));

    auto cpoint = analyze_corpus("cpoint.l42mu");
    REQUIRE(cpoint.ok());
    CHECK(coherent(tp({"CPoint"}), literal_of(cpoint, "CPoint")));

    auto fcpoint = analyze_corpus("fcpoint.l42mu");
    REQUIRE(fcpoint.ok());
    CHECK(coherent(tp({"FCPoint"}), literal_of(fcpoint, "FCPoint")));
}

TEST_CASE("more than one abstract static method breaks coherence") {
    auto analyzed = analyze_src(
        "A= {static method This of(int x)\n"
        "  static method This make(int x)\n"
        "  method int x()}");
    REQUIRE_FALSE(analyzed.ok());
    CHECK(analyzed.compiled.error->code == DiagCode::NotCoherent);
    CHECK(analyzed.compiled.error->message.find("more than one abstract static") !=
          std::string::npos);
}

TEST_CASE("setter-shaped methods break coherence with a hint") {
    auto analyzed = analyze_src(
        "A= {static method This of(int x)\n"
        "  method int x()\n"
        "  method void x(int that)}");
    REQUIRE_FALSE(analyzed.ok());
    CHECK(analyzed.compiled.error->code == DiagCode::NotCoherent);
    CHECK(analyzed.compiled.error->message.find("setters are not supported") != std::string::npos);
}

TEST_CASE("coherence is invariant under member permutation") {
    Rng rng(7);
    GenConfig cfg;
    for (int i = 0; i < 200; ++i) {
        CodeLiteral lit = gen_literal(rng, cfg);
        bool expected = coherent(tp({"X"}), lit);
        CodeLiteral rotated = lit;
        for (size_t k = 0; k + 1 < lit.members.size(); ++k) {
            std::rotate(rotated.members.begin(), rotated.members.begin() + 1,
                        rotated.members.end());
            CHECK(coherent(tp({"X"}), rotated) == expected);
        }
    }
}

TEST_CASE("getters stay within the factory parameters") {
    for (const char* name : {"point_algebra.l42mu", "point_wither.l42mu", "cpoint.l42mu",
                             "fcpoint.l42mu", "set_bag_v1.l42mu"}) {
        auto analyzed = analyze_corpus(name);
        REQUIRE(analyzed.ok());
        for (const auto& d : analyzed.compiled.table.decls) {
            if (!d.is_class()) continue;
            AbstractStateReport r = abstract_state(tp({d.name}), *d.literal());
            if (!r.factory) continue;
            CHECK(r.getters.size() <= static_cast<size_t>(r.factory->arity()));
            for (const auto& [param, sig] : r.getters) {
                bool matched = false;
                for (const auto& p : r.factory->params) {
                    if (p.name == param) {
                        matched = true;
                        CHECK(p.type == sig.return_type);
                    }
                }
                CHECK(matched);
            }
        }
    }
}

TEST_CASE("summing two well-typed literals preserves typability") {
    // The monotonicity lemma behind compilation soundness, sampled. The
    // backing table declares the class-name pool so signature types resolve.
    auto backing = parse_program("A= {}\nB= {}\nC= {}\nD= {}\nE= {}");
    REQUIRE(backing.ok());
    DeclarationTable pool = backing.value();
    Rng rng(11);
    GenConfig cfg;
    TableView view;
    view.table = &pool;
    view.prelude = false;

    auto literal_ok = [&](const CodeLiteral& lit) {
        TableView v = view.with_this(&lit);
        return check_literal(v, tp({"This"}), lit).empty();
    };

    int checked = 0;
    for (int i = 0; i < 3000 && checked < 120; ++i) {
        CodeLiteral l1 = gen_literal(rng, cfg);
        CodeLiteral l2 = gen_literal(rng, cfg);
        if (!wf_literal(l1).empty() || !wf_literal(l2).empty()) continue;
        if (!literal_ok(l1) || !literal_ok(l2)) continue;
        auto sum = sum_literals(l1, l2);
        if (!sum.ok()) continue;
        ++checked;
        std::string witness = canonical_print(l1, false) + "\n+\n" + canonical_print(l2, false);
        CHECK_MESSAGE(literal_ok(sum.value()), witness);
    }
    CHECK(checked > 0);
}
