#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "l42mu/diag.hpp"

namespace l42mu {

// ---------------------------------------------------------------------------
// Names and type paths
// ---------------------------------------------------------------------------

// Class names start uppercase, trait/method/variable names start lowercase
// (or underscore). "This" is the reserved self-type root.
bool is_class_name(std::string_view text);

inline constexpr std::string_view kThisName = "This";

// Nominal type: a dotted path of class names, optionally rooted at This.
struct TypePath {
    std::vector<std::string> segments;
    Span span{};

    TypePath() = default;
    explicit TypePath(std::string single, Span s = {}) : segments{std::move(single)}, span(s) {}
    TypePath(std::vector<std::string> segs, Span s = {}) : segments(std::move(segs)), span(s) {}

    bool this_rooted() const { return !segments.empty() && segments.front() == kThisName; }
    std::string str() const;
};

bool operator==(const TypePath& a, const TypePath& b);
inline bool operator!=(const TypePath& a, const TypePath& b) { return !(a == b); }
bool path_less(const TypePath& a, const TypePath& b);

// ---------------------------------------------------------------------------
// Runtime expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct VarExpr {
    std::string name;  // includes "this"
};

struct CallExpr {
    ExprPtr receiver;
    std::string method;
    std::vector<ExprPtr> args;
};

struct StaticCallExpr {
    TypePath type;
    std::string method;
    std::vector<ExprPtr> args;
};

struct IntConst {
    std::int64_t value = 0;
};

struct BoolConst {
    bool value = false;
};

struct Expr {
    std::variant<VarExpr, CallExpr, StaticCallExpr, IntConst, BoolConst> node;
    Span span{};
};

ExprPtr make_expr(Expr e);
ExprPtr make_var(std::string name, Span s = {});
ExprPtr make_call(ExprPtr recv, std::string method, std::vector<ExprPtr> args, Span s = {});
ExprPtr make_static_call(TypePath type, std::string method, std::vector<ExprPtr> args, Span s = {});
ExprPtr make_int(std::int64_t v, Span s = {});
ExprPtr make_bool(bool v, Span s = {});

bool equal_expr(const Expr& a, const Expr& b);
bool equal_expr(const ExprPtr& a, const ExprPtr& b);

// ---------------------------------------------------------------------------
// Code literals and members
// ---------------------------------------------------------------------------

struct Param {
    TypePath type;
    std::string name;
};

struct MethodSig {
    bool is_static = false;
    std::string name;
    std::vector<Param> params;
    TypePath return_type;
    Span span{};

    int arity() const { return static_cast<int>(params.size()); }
};

// Full header identity: staticness, name, parameter types *and names*, return.
bool same_signature(const MethodSig& a, const MethodSig& b);
// Interface-conformance identity: ignores parameter names.
bool same_header_types(const MethodSig& a, const MethodSig& b);

struct CodeLiteral;
using LiteralPtr = std::shared_ptr<const CodeLiteral>;

struct MethodMember {
    MethodSig sig;
    ExprPtr body;  // null = abstract

    bool is_abstract() const { return body == nullptr; }
};

struct NestedClass {
    std::string name;
    LiteralPtr body;
    Span span{};
};

struct Member {
    std::variant<MethodMember, NestedClass> node;

    const MethodMember* as_method() const { return std::get_if<MethodMember>(&node); }
    const NestedClass* as_nested() const { return std::get_if<NestedClass>(&node); }
};

struct CodeLiteral {
    bool is_interface = false;
    std::vector<TypePath> implements;  // source order; compared as a set
    std::vector<Member> members;       // source order; compared as a set
    Span span{};

    const MethodMember* find_method(std::string_view name, int arity) const;
    // All methods with the given name, any arity.
    std::vector<const MethodMember*> methods_named(std::string_view name) const;
    const NestedClass* find_nested(std::string_view name) const;
};

LiteralPtr make_literal(CodeLiteral lit);

// ---------------------------------------------------------------------------
// Composition expressions and declarations
// ---------------------------------------------------------------------------

struct CodeExpr;
using CodeExprPtr = std::shared_ptr<const CodeExpr>;

struct LitExpr {
    CodeLiteral lit;
};

struct TraitRef {
    std::string name;
};

struct SumExpr {
    CodeExprPtr lhs;
    CodeExprPtr rhs;
};

struct RenameExpr {
    CodeExprPtr base;
    std::string from;
    std::string to;
};

struct SuperAsExpr {
    CodeExprPtr base;
    std::string target;
    int arity = -1;  // -1: unique method with that name
    std::string alias;
};

struct CodeExpr {
    std::variant<LitExpr, TraitRef, SumExpr, RenameExpr, SuperAsExpr> node;
    Span span{};

    const LitExpr* as_lit() const { return std::get_if<LitExpr>(&node); }
};

CodeExprPtr make_code_expr(CodeExpr e);
CodeExprPtr make_lit_expr(CodeLiteral lit, Span s = {});

struct Declaration {
    std::string name;
    CodeExprPtr body;
    Span span{};

    bool is_class() const { return is_class_name(name); }
    // Non-null when the body is a plain literal.
    const CodeLiteral* literal() const;
};

struct DeclarationTable {
    std::vector<Declaration> decls;

    int index_of(std::string_view name) const;  // -1 if absent
    const Declaration* find(std::string_view name) const;
};

bool table_flattened(const DeclarationTable& table);

// Replace every This-rooted type path with one rooted at `class_name`
// (applied to a class's literal once flattening completes).
CodeLiteral substitute_this(const CodeLiteral& lit, const std::string& class_name);

// Scope stack for name qualification: (literal, nested-class name) pairs from
// the operand root (empty name) inward. Shared by the parser's qualification
// pre-pass and the canonical printer's path shortening.
using ScopeLevels = std::vector<std::pair<const CodeLiteral*, std::string>>;
TypePath qualify_path_at(const TypePath& path, const ScopeLevels& levels,
                         const DeclarationTable* table, bool prelude);

// ---------------------------------------------------------------------------
// Table views and lookup
// ---------------------------------------------------------------------------

// The intrinsic Int/Bool/Void declarations backing literal syntax.
const DeclarationTable& prelude_table();
bool is_prelude_type(std::string_view name);

// Resolution context: a table (possibly mid-flattening), an optional binding
// for This (trait checking), an optional prelude fallback, and a visibility
// limit used while compiling declaration `current`.
struct TableView {
    const DeclarationTable* table = nullptr;
    const CodeLiteral* this_binding = nullptr;
    bool prelude = true;
    int limit = -1;    // indices >= limit are not resolvable (-1: all visible)
    int current = -1;  // declaration being compiled, for error classification

    TableView with_this(const CodeLiteral* binding) const {
        TableView v = *this;
        v.this_binding = binding;
        return v;
    }

    // Top-level resolution respecting limit; only literal-bodied declarations
    // resolve. Returns null on failure.
    const CodeLiteral* resolve_top(std::string_view name) const;
    const CodeLiteral* resolve(const TypePath& path) const;

    // Diagnose a failed resolution of `path` (unknown vs. declared later vs.
    // the declaration currently being compiled).
    Diagnostic resolve_failure(const TypePath& path) const;
};

const CodeLiteral* lookup_type(const TableView& view, const TypePath& path);
const MethodMember* lookup_member(const TableView& view, const TypePath& path,
                                  std::string_view name, int arity);

}  // namespace l42mu
