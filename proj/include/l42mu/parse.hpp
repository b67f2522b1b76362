#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "l42mu/ast.hpp"
#include "l42mu/diag.hpp"

namespace l42mu {

enum class TokKind {
    Ident,    // classified by leading-letter case at use sites
    IntLit,
    KwInterface,
    KwImplements,
    KwMethod,
    KwStatic,
    KwUse,
    KwRename,
    KwInto,
    KwSuper,
    KwAs,
    KwReturn,
    KwThis,
    KwTrue,
    KwFalse,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    EqEq,
    Lt,
    AndAnd,
    OrOr,
    Bang,
    Comma,
    Eq,
    Dot,
    Semi,
    End,
};

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    Span span{};
};

// Maximal-munch lexer; `//` comments run to end of line. `int`, `bool` and
// `void` lex as the identifiers Int, Bool, Void.
Expected<std::vector<Token>> tokenize(std::string_view source, std::uint32_t file_id = 0);

Expected<DeclarationTable> parse_program(const std::vector<Token>& tokens);
Expected<DeclarationTable> parse_program(std::string_view source, std::uint32_t file_id = 0);

// A closed expression, for the run command.
Expected<ExprPtr> parse_expression(std::string_view source, std::uint32_t file_id = 0);

// `Use i1, ..., in` becomes the left-associated sum of the items.
CodeExprPtr desugar_use(std::vector<CodeExprPtr> items, Span span = {});

// Rewrite bare class names in type positions: innermost sibling-or-enclosing
// nested class wins (This-rooted); otherwise a top-level class stays absolute;
// otherwise the name is presumed a member of the composed result (This-rooted).
DeclarationTable qualify_names(const DeclarationTable& table, bool prelude = true);

}  // namespace l42mu
