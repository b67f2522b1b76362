#include <utility>

#include "l42mu/parse.hpp"

namespace l42mu {

namespace {

struct ParseError {
    Diagnostic diag;
};

[[noreturn]] void fail(Span span, std::string message) {
    throw ParseError{make_diag(DiagCode::NotWellFormed, span, std::move(message))};
}

bool upper_ident(const Token& t) { return t.kind == TokKind::Ident && is_class_name(t.text); }
bool lower_ident(const Token& t) { return t.kind == TokKind::Ident && !is_class_name(t.text); }

Span merge_spans(Span a, Span b) {
    if (a.line == 0) return b;
    if (b.line == 0) return a;
    Span s = a;
    s.end_line = b.end_line;
    s.end_col = b.end_col;
    return s;
}

class Parser {
  public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    DeclarationTable program() {
        DeclarationTable table;
        while (!at(TokKind::End)) table.decls.push_back(declaration());
        return table;
    }

    ExprPtr expression_only() {
        ExprPtr e = expression();
        expect(TokKind::End, "expected end of expression");
        return e;
    }

  private:
    const std::vector<Token>& toks_;
    size_t pos_ = 0;

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        if (i >= toks_.size()) i = toks_.size() - 1;
        return toks_[i];
    }
    bool at(TokKind k) const { return peek().kind == k; }
    const Token& advance() { return toks_[pos_++]; }
    const Token& expect(TokKind k, const char* what) {
        if (!at(k)) fail(peek().span, what);
        return advance();
    }

    Declaration declaration() {
        const Token& name = peek();
        if (name.kind != TokKind::Ident) fail(name.span, "expected a declaration name");
        if (name.text == kThisName) fail(name.span, "This cannot be declared");
        advance();
        expect(TokKind::Eq, "expected '=' after declaration name");
        CodeExprPtr body = code_expr();
        Declaration d;
        d.name = name.text;
        d.body = std::move(body);
        d.span = name.span;
        return d;
    }

    // cexpr := primary ('+' primary)*
    CodeExprPtr code_expr() {
        CodeExprPtr lhs = primary();
        while (at(TokKind::Plus)) {
            Span op = advance().span;
            CodeExprPtr rhs = primary();
            Span s = merge_spans(merge_spans(lhs->span, op), rhs->span);
            lhs = make_code_expr(CodeExpr{SumExpr{std::move(lhs), std::move(rhs)}, s});
        }
        return lhs;
    }

    CodeExprPtr primary() {
        if (at(TokKind::KwUse)) {
            Span s = advance().span;
            std::vector<CodeExprPtr> items;
            items.push_back(use_item());
            while (at(TokKind::Comma)) {
                advance();
                items.push_back(use_item());
            }
            return desugar_use(std::move(items), s);
        }
        return use_item();
    }

    CodeExprPtr use_item() {
        CodeExprPtr base;
        if (at(TokKind::LBrace)) {
            base = literal_expr();
        } else if (lower_ident(peek())) {
            const Token& t = advance();
            base = make_code_expr(CodeExpr{TraitRef{t.text}, t.span});
        } else if (at(TokKind::LParen)) {
            advance();
            base = code_expr();
            expect(TokKind::RParen, "expected ')'");
        } else if (upper_ident(peek()) || peek().kind == TokKind::KwThis) {
            fail(peek().span, "class names cannot appear in composition expressions");
        } else {
            fail(peek().span, "expected a trait name, code literal, or '('");
        }
        while (at(TokKind::LBracket)) base = suffix(std::move(base));
        return base;
    }

    CodeExprPtr suffix(CodeExprPtr base) {
        Span open = expect(TokKind::LBracket, "expected '['").span;
        if (at(TokKind::KwRename)) {
            advance();
            const Token& from = peek();
            if (!upper_ident(from)) fail(from.span, "expected a class name after 'rename'");
            advance();
            expect(TokKind::KwInto, "expected 'into'");
            const Token& to = peek();
            if (!upper_ident(to)) fail(to.span, "expected a class name after 'into'");
            advance();
            Span close = expect(TokKind::RBracket, "expected ']'").span;
            Span s = merge_spans(base->span, merge_spans(open, close));
            return make_code_expr(CodeExpr{RenameExpr{std::move(base), from.text, to.text}, s});
        }
        if (at(TokKind::KwSuper)) {
            advance();
            const Token& target = peek();
            if (!lower_ident(target)) fail(target.span, "expected a method name after 'super'");
            advance();
            int arity = -1;
            if (at(TokKind::Slash)) {
                advance();
                const Token& n = expect(TokKind::IntLit, "expected an arity after '/'");
                arity = std::stoi(n.text);
            }
            expect(TokKind::KwAs, "expected 'as'");
            const Token& alias = peek();
            if (!lower_ident(alias)) fail(alias.span, "expected a method name after 'as'");
            advance();
            Span close = expect(TokKind::RBracket, "expected ']'").span;
            Span s = merge_spans(base->span, merge_spans(open, close));
            return make_code_expr(
                CodeExpr{SuperAsExpr{std::move(base), target.text, arity, alias.text}, s});
        }
        fail(peek().span, "expected 'rename' or 'super'");
    }

    CodeExprPtr literal_expr() {
        Span start = peek().span;
        CodeLiteral lit = literal();
        lit.span = merge_spans(start, lit.span);
        Span s = lit.span;
        return make_lit_expr(std::move(lit), s);
    }

    CodeLiteral literal() {
        Span open = expect(TokKind::LBrace, "expected '{'").span;
        CodeLiteral lit;
        lit.span = open;
        if (at(TokKind::KwInterface)) {
            advance();
            lit.is_interface = true;
        }
        if (at(TokKind::KwImplements)) {
            advance();
            lit.implements.push_back(type_path());
            while (at(TokKind::Comma)) {
                advance();
                lit.implements.push_back(type_path());
            }
        }
        while (!at(TokKind::RBrace)) {
            lit.members.push_back(member());
        }
        Span close = advance().span;
        lit.span = merge_spans(open, close);
        return lit;
    }

    Member member() {
        if (at(TokKind::KwStatic) || at(TokKind::KwMethod)) return Member{method_member()};
        const Token& name = peek();
        if (upper_ident(name) && peek(1).kind == TokKind::Eq) {
            if (name.text == kThisName) fail(name.span, "a nested class cannot be called This");
            advance();
            advance();
            CodeLiteral body = literal();
            return Member{NestedClass{name.text, make_literal(std::move(body)), name.span}};
        }
        fail(name.span, "expected a method or nested class declaration");
    }

    MethodMember method_member() {
        MethodSig sig;
        Span start = peek().span;
        if (at(TokKind::KwStatic)) {
            advance();
            sig.is_static = true;
        }
        expect(TokKind::KwMethod, "expected 'method'");
        sig.return_type = type_path();
        const Token& name = peek();
        if (!lower_ident(name)) fail(name.span, "expected a method name");
        advance();
        sig.name = name.text;
        sig.span = merge_spans(start, name.span);
        expect(TokKind::LParen, "expected '('");
        if (!at(TokKind::RParen)) {
            sig.params.push_back(param());
            while (at(TokKind::Comma)) {
                advance();
                sig.params.push_back(param());
            }
        }
        expect(TokKind::RParen, "expected ')'");
        ExprPtr body;
        if (at(TokKind::LBrace)) {
            advance();
            expect(TokKind::KwReturn, "expected 'return'");
            body = expression();
            if (at(TokKind::Semi)) advance();
            expect(TokKind::RBrace, "expected '}' after return expression");
        }
        return MethodMember{std::move(sig), std::move(body)};
    }

    Param param() {
        TypePath type = type_path();
        const Token& name = peek();
        if (!lower_ident(name)) fail(name.span, "expected a parameter name");
        if (name.text == "this") fail(name.span, "a parameter cannot be named this");
        advance();
        return Param{std::move(type), name.text};
    }

    TypePath type_path() {
        const Token& first = peek();
        if (!upper_ident(first)) fail(first.span, "expected a type name");
        advance();
        TypePath p;
        p.segments.push_back(first.text);
        p.span = first.span;
        while (at(TokKind::Dot) && upper_ident(peek(1))) {
            advance();
            const Token& seg = advance();
            p.segments.push_back(seg.text);
            p.span = merge_spans(p.span, seg.span);
        }
        return p;
    }

    // Expression grammar: || < && < (== <) < (+ -) < (* /) < ! < calls.
    ExprPtr expression() { return or_expr(); }

    ExprPtr binary(ExprPtr lhs, const char* method, ExprPtr rhs, Span op) {
        Span s = merge_spans(merge_spans(lhs->span, op), rhs->span);
        return make_call(std::move(lhs), method, {std::move(rhs)}, s);
    }

    ExprPtr or_expr() {
        ExprPtr e = and_expr();
        while (at(TokKind::OrOr)) {
            Span op = advance().span;
            e = binary(std::move(e), "or", and_expr(), op);
        }
        return e;
    }

    ExprPtr and_expr() {
        ExprPtr e = cmp_expr();
        while (at(TokKind::AndAnd)) {
            Span op = advance().span;
            e = binary(std::move(e), "and", cmp_expr(), op);
        }
        return e;
    }

    ExprPtr cmp_expr() {
        ExprPtr e = add_expr();
        if (at(TokKind::EqEq)) {
            Span op = advance().span;
            return binary(std::move(e), "eq", add_expr(), op);
        }
        if (at(TokKind::Lt)) {
            Span op = advance().span;
            return binary(std::move(e), "lt", add_expr(), op);
        }
        return e;
    }

    ExprPtr add_expr() {
        ExprPtr e = mul_expr();
        while (at(TokKind::Plus) || at(TokKind::Minus)) {
            bool plus = at(TokKind::Plus);
            Span op = advance().span;
            e = binary(std::move(e), plus ? "add" : "sub", mul_expr(), op);
        }
        return e;
    }

    ExprPtr mul_expr() {
        ExprPtr e = unary_expr();
        while (at(TokKind::Star) || at(TokKind::Slash)) {
            bool mul = at(TokKind::Star);
            Span op = advance().span;
            e = binary(std::move(e), mul ? "mul" : "div", unary_expr(), op);
        }
        return e;
    }

    ExprPtr unary_expr() {
        if (at(TokKind::Bang)) {
            Span op = advance().span;
            ExprPtr e = unary_expr();
            Span s = merge_spans(op, e->span);
            return make_call(std::move(e), "not", {}, s);
        }
        return postfix_expr();
    }

    ExprPtr postfix_expr() {
        ExprPtr e = atom();
        while (at(TokKind::Dot)) {
            advance();
            const Token& name = peek();
            if (!lower_ident(name)) fail(name.span, "expected a method name after '.'");
            advance();
            std::vector<ExprPtr> args = call_args();
            Span s = merge_spans(e->span, name.span);
            e = make_call(std::move(e), name.text, std::move(args), s);
        }
        return e;
    }

    std::vector<ExprPtr> call_args() {
        expect(TokKind::LParen, "expected '('");
        std::vector<ExprPtr> args;
        if (!at(TokKind::RParen)) {
            args.push_back(expression());
            while (at(TokKind::Comma)) {
                advance();
                args.push_back(expression());
            }
        }
        expect(TokKind::RParen, "expected ')'");
        return args;
    }

    ExprPtr atom() {
        const Token& t = peek();
        switch (t.kind) {
            case TokKind::KwThis: advance(); return make_var("this", t.span);
            case TokKind::KwTrue: advance(); return make_bool(true, t.span);
            case TokKind::KwFalse: advance(); return make_bool(false, t.span);
            case TokKind::IntLit: advance(); return make_int(std::stoll(t.text), t.span);
            case TokKind::LParen: {
                advance();
                ExprPtr e = expression();
                expect(TokKind::RParen, "expected ')'");
                return e;
            }
            case TokKind::Ident: {
                if (!is_class_name(t.text)) {
                    advance();
                    return make_var(t.text, t.span);
                }
                TypePath type = type_path();
                expect(TokKind::Dot, "expected '.' after a type name");
                const Token& name = peek();
                if (!lower_ident(name)) fail(name.span, "expected a method name after '.'");
                advance();
                std::vector<ExprPtr> args = call_args();
                Span s = merge_spans(type.span, name.span);
                return make_static_call(std::move(type), name.text, std::move(args), s);
            }
            default: fail(t.span, "expected an expression");
        }
    }
};

}  // namespace

Expected<DeclarationTable> parse_program(const std::vector<Token>& tokens) {
    try {
        Parser p(tokens);
        return p.program();
    } catch (const ParseError& e) {
        return e.diag;
    }
}

Expected<DeclarationTable> parse_program(std::string_view source, std::uint32_t file_id) {
    auto toks = tokenize(source, file_id);
    if (!toks.ok()) return toks.error();
    return parse_program(toks.value());
}

Expected<ExprPtr> parse_expression(std::string_view source, std::uint32_t file_id) {
    auto toks = tokenize(source, file_id);
    if (!toks.ok()) return toks.error();
    try {
        Parser p(toks.value());
        return p.expression_only();
    } catch (const ParseError& e) {
        return e.diag;
    }
}

CodeExprPtr desugar_use(std::vector<CodeExprPtr> items, Span span) {
    CodeExprPtr acc = std::move(items.front());
    for (size_t i = 1; i < items.size(); ++i) {
        Span s = merge_spans(merge_spans(acc->span, span), items[i]->span);
        acc = make_code_expr(CodeExpr{SumExpr{std::move(acc), std::move(items[i])}, s});
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Name qualification
// ---------------------------------------------------------------------------

namespace {

struct QualifyCtx {
    const DeclarationTable* table;
    bool prelude;
    std::vector<std::pair<const CodeLiteral*, std::string>> levels;

    TypePath qualify(const TypePath& p) const {
        return qualify_path_at(p, levels, table, prelude);
    }
};

ExprPtr qualify_expr(const ExprPtr& e, const QualifyCtx& ctx) {
    if (!e) return e;
    if (const auto* c = std::get_if<CallExpr>(&e->node)) {
        std::vector<ExprPtr> args;
        args.reserve(c->args.size());
        for (const auto& a : c->args) args.push_back(qualify_expr(a, ctx));
        return make_call(qualify_expr(c->receiver, ctx), c->method, std::move(args), e->span);
    }
    if (const auto* s = std::get_if<StaticCallExpr>(&e->node)) {
        std::vector<ExprPtr> args;
        args.reserve(s->args.size());
        for (const auto& a : s->args) args.push_back(qualify_expr(a, ctx));
        return make_static_call(ctx.qualify(s->type), s->method, std::move(args), e->span);
    }
    return e;
}

CodeLiteral qualify_literal(const CodeLiteral& lit, QualifyCtx& ctx) {
    CodeLiteral out = lit;
    for (auto& t : out.implements) t = ctx.qualify(t);
    for (auto& m : out.members) {
        if (auto* mm = std::get_if<MethodMember>(&m.node)) {
            for (auto& p : mm->sig.params) p.type = ctx.qualify(p.type);
            mm->sig.return_type = ctx.qualify(mm->sig.return_type);
            mm->body = qualify_expr(mm->body, ctx);
        } else {
            auto& nc = std::get<NestedClass>(m.node);
            ctx.levels.emplace_back(nc.body.get(), nc.name);
            nc.body = make_literal(qualify_literal(*nc.body, ctx));
            ctx.levels.pop_back();
        }
    }
    return out;
}

CodeExprPtr qualify_code_expr(const CodeExprPtr& e, const DeclarationTable& table, bool prelude) {
    if (const auto* l = e->as_lit()) {
        QualifyCtx ctx{&table, prelude, {{&l->lit, std::string()}}};
        return make_lit_expr(qualify_literal(l->lit, ctx), e->span);
    }
    if (const auto* s = std::get_if<SumExpr>(&e->node)) {
        return make_code_expr(CodeExpr{SumExpr{qualify_code_expr(s->lhs, table, prelude),
                                               qualify_code_expr(s->rhs, table, prelude)},
                                       e->span});
    }
    if (const auto* r = std::get_if<RenameExpr>(&e->node)) {
        return make_code_expr(
            CodeExpr{RenameExpr{qualify_code_expr(r->base, table, prelude), r->from, r->to},
                     e->span});
    }
    if (const auto* sa = std::get_if<SuperAsExpr>(&e->node)) {
        return make_code_expr(CodeExpr{SuperAsExpr{qualify_code_expr(sa->base, table, prelude),
                                                   sa->target, sa->arity, sa->alias},
                                       e->span});
    }
    return e;  // trait reference
}

}  // namespace

DeclarationTable qualify_names(const DeclarationTable& table, bool prelude) {
    DeclarationTable out = table;
    for (auto& d : out.decls) d.body = qualify_code_expr(d.body, table, prelude);
    return out;
}

}  // namespace l42mu
