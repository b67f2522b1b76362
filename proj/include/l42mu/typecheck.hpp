#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l42mu/ast.hpp"
#include "l42mu/diag.hpp"

namespace l42mu {

struct TypeEnv {
    std::vector<std::pair<std::string, TypePath>> bindings;

    const TypePath* lookup(std::string_view name) const {
        for (const auto& [n, t] : bindings)
            if (n == name) return &t;
        return nullptr;
    }
};

// Classification of a literal's abstract methods as state operations.
struct AbstractStateReport {
    std::optional<MethodSig> factory;
    std::vector<std::pair<std::string, MethodSig>> getters;  // factory param -> getter
    std::vector<std::pair<std::string, MethodSig>> withers;  // factory param -> wither
    std::vector<MethodSig> unclassified;
    bool has_abstract = false;

    bool coherent_class() const {
        return unclassified.empty() && (factory.has_value() || !has_abstract);
    }
};

// Reflexive-transitive closure of declared implements edges.
bool subtype(const TableView& view, const TypePath& t1, const TypePath& t2);

Expected<TypePath> type_expr(const TableView& view, const TypeEnv& env, const Expr& e);

std::vector<Diagnostic> check_method(const TableView& view, const TypePath& self,
                                     const MethodMember& m);
std::vector<Diagnostic> check_literal(const TableView& view, const TypePath& self,
                                      const CodeLiteral& lit);

// Class: substitute This -> C, check the literal, then require coherence.
// Trait: bind This to the literal and check it.
std::vector<Diagnostic> check_declaration(const TableView& view, const Declaration& decl,
                                          int index = -1);

AbstractStateReport abstract_state(const TypePath& nominal, const CodeLiteral& lit);
bool coherent(const TypePath& nominal, const CodeLiteral& lit);

// Human-readable coherence report (cli check --explain-coherence).
std::string explain_coherence(const TypePath& nominal, const CodeLiteral& lit);

// The wither derived from a factory parameter name: "with" + capitalized name.
std::string wither_name(const std::string& param_name);
// Inverse; empty if the method name is not wither-shaped.
std::string wither_param(const std::string& method_name);

}  // namespace l42mu
