#pragma once

#include <vector>

#include "l42mu/ast.hpp"
#include "l42mu/diag.hpp"

namespace l42mu {

// Structural well-formedness of one literal (recursive): unique non-`this`
// parameters, unique (name, arity) method identities, unique nested-class
// names with no nested This, used variables in scope, interfaces fully
// abstract with no static methods.
std::vector<Diagnostic> wf_literal(const CodeLiteral& lit);

// Table-level well-formedness: unique top-level names, no top-level This,
// reserved prelude names, plus wf_literal over every literal in every body.
std::vector<Diagnostic> wf_program(const DeclarationTable& table, bool prelude = true);

// consistentSubtype: every implemented path resolves to an interface, every
// interface method is present with identical parameter/return types, nested
// literals recursively consistent. `view.this_binding` must be the outer
// literal. All violations carry the ImplementsClash code.
std::vector<Diagnostic> consistent_subtype(const TableView& view, const CodeLiteral& outer);

// Reject circular `implements` chains reachable from the given literal.
std::vector<Diagnostic> implements_acyclic(const TableView& view, const TypePath& self,
                                           const CodeLiteral& lit);

// Default-mode normalization: copy missing interface methods into
// implementing literals as abstract declarations, wherever the interface is
// resolvable from source (This-rooted sibling or literal-bodied top level).
DeclarationTable normalize_interface_imports(const DeclarationTable& table, bool prelude = true);

}  // namespace l42mu
