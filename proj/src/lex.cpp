#include <cctype>

#include "l42mu/parse.hpp"

namespace l42mu {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

TokKind keyword_kind(std::string_view text) {
    if (text == "interface") return TokKind::KwInterface;
    if (text == "implements") return TokKind::KwImplements;
    if (text == "method") return TokKind::KwMethod;
    if (text == "static") return TokKind::KwStatic;
    if (text == "Use") return TokKind::KwUse;
    if (text == "rename") return TokKind::KwRename;
    if (text == "into") return TokKind::KwInto;
    if (text == "super") return TokKind::KwSuper;
    if (text == "as") return TokKind::KwAs;
    if (text == "return") return TokKind::KwReturn;
    if (text == "this") return TokKind::KwThis;
    if (text == "true") return TokKind::KwTrue;
    if (text == "false") return TokKind::KwFalse;
    return TokKind::Ident;
}

std::string alias_ident(std::string text) {
    if (text == "int") return "Int";
    if (text == "bool") return "Bool";
    if (text == "void") return "Void";
    return text;
}

}  // namespace

Expected<std::vector<Token>> tokenize(std::string_view source, std::uint32_t file_id) {
    std::vector<Token> out;
    std::uint32_t line = 1, col = 1;
    size_t i = 0;
    const size_t n = source.size();

    auto span_here = [&](std::uint32_t len) {
        return Span{file_id, line, col, line, col + len};
    };
    auto push = [&](TokKind kind, std::string text, std::uint32_t len) {
        out.push_back(Token{kind, std::move(text), span_here(len)});
        col += len;
        i += len;
    };

    while (i < n) {
        char c = source[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++col;
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && source[i + 1] == '/') {
            while (i < n && source[i] != '\n') {
                ++i;
                ++col;
            }
            continue;
        }
        if (ident_start(c)) {
            size_t j = i;
            while (j < n && ident_char(source[j])) ++j;
            std::string text(source.substr(i, j - i));
            TokKind kind = keyword_kind(text);
            if (kind == TokKind::Ident) text = alias_ident(std::move(text));
            push(kind, std::move(text), static_cast<std::uint32_t>(j - i));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
            push(TokKind::IntLit, std::string(source.substr(i, j - i)),
                 static_cast<std::uint32_t>(j - i));
            continue;
        }
        switch (c) {
            case '{': push(TokKind::LBrace, "{", 1); continue;
            case '}': push(TokKind::RBrace, "}", 1); continue;
            case '(': push(TokKind::LParen, "(", 1); continue;
            case ')': push(TokKind::RParen, ")", 1); continue;
            case '[': push(TokKind::LBracket, "[", 1); continue;
            case ']': push(TokKind::RBracket, "]", 1); continue;
            case '+': push(TokKind::Plus, "+", 1); continue;
            case '-': push(TokKind::Minus, "-", 1); continue;
            case '*': push(TokKind::Star, "*", 1); continue;
            case '/': push(TokKind::Slash, "/", 1); continue;
            case ',': push(TokKind::Comma, ",", 1); continue;
            case '.': push(TokKind::Dot, ".", 1); continue;
            case ';': push(TokKind::Semi, ";", 1); continue;
            case '!': push(TokKind::Bang, "!", 1); continue;
            case '<': push(TokKind::Lt, "<", 1); continue;
            case '=':
                if (i + 1 < n && source[i + 1] == '=') {
                    push(TokKind::EqEq, "==", 2);
                } else {
                    push(TokKind::Eq, "=", 1);
                }
                continue;
            case '&':
                if (i + 1 < n && source[i + 1] == '&') {
                    push(TokKind::AndAnd, "&&", 2);
                    continue;
                }
                break;
            case '|':
                if (i + 1 < n && source[i + 1] == '|') {
                    push(TokKind::OrOr, "||", 2);
                    continue;
                }
                break;
            default: break;
        }
        return make_diag(DiagCode::NotWellFormed, span_here(1),
                         std::string("illegal character '") + c + "'");
    }
    out.push_back(Token{TokKind::End, "", Span{file_id, line, col, line, col}});
    return out;
}

}  // namespace l42mu
