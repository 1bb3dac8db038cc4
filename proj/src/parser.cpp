#include "accel/parser.hpp"

#include <cctype>

namespace accel::ast {

namespace {

enum class Tok {
    End,
    Ident,
    Keyword,
    Number,
    String,
    Punct,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Scalar value;  // Number/String payload
    int line = 1, col = 1;
};

bool is_keyword(const std::string& s) {
    static const char* kws[] = {"let", "function", "if", "else", "while", "return",
                                "break", "for", "true", "false", "undefined"};
    for (const char* k : kws)
        if (s == k) return true;
    return false;
}

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1, col = 1;

    explicit Lexer(const std::string& s) : src(s) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ParseError::Kind::Syntax, msg, line, col);
    }

    char peek(size_t off = 0) const { return pos + off < src.size() ? src[pos + off] : '\0'; }

    char advance() {
        char c = src[pos++];
        if (c == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
        return c;
    }

    void skip_trivia() {
        while (pos < src.size()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos < src.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                advance();
                advance();
                while (pos < src.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos >= src.size()) fail("unterminated block comment");
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    Token next() {
        skip_trivia();
        Token t;
        t.line = line;
        t.col = col;
        if (pos >= src.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                word += advance();
            t.kind = is_keyword(word) ? Tok::Keyword : Tok::Ident;
            t.text = std::move(word);
            return t;
        }
        if (c == '$') {
            throw ParseError(ParseError::Kind::Syntax,
                             "identifiers may not contain '$' (reserved for generated names)",
                             line, col);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (pos < src.size() && (std::isdigit(static_cast<unsigned char>(peek())) ||
                                        peek() == '.' || peek() == 'e' || peek() == 'E' ||
                                        ((peek() == '+' || peek() == '-') && num.size() > 0 &&
                                         (num.back() == 'e' || num.back() == 'E'))))
                num += advance();
            t.kind = Tok::Number;
            t.text = num;
            t.value = parse_number_literal(num);
            return t;
        }
        if (c == '\'' || c == '"') {
            char quote = advance();
            std::string s;
            while (true) {
                if (pos >= src.size()) fail("unterminated string literal");
                char d = advance();
                if (d == quote) break;
                if (d == '\\') {
                    if (pos >= src.size()) fail("unterminated string escape");
                    char e = advance();
                    switch (e) {
                        case 'n': s += '\n'; break;
                        case 't': s += '\t'; break;
                        case 'r': s += '\r'; break;
                        case '\\': s += '\\'; break;
                        case '\'': s += '\''; break;
                        case '"': s += '"'; break;
                        default: fail(std::string("unsupported escape '\\") + e + "'");
                    }
                } else {
                    s += d;
                }
            }
            t.kind = Tok::String;
            t.value = Scalar::str(std::move(s));
            return t;
        }
        // punctuation / operators, longest match first
        static const char* puncts[] = {"===", "!==", "=>", "<=", ">=", "==", "!=", "(",
                                       ")",   "{",   "}",  "[",  "]",  ";",  ":",  ",",
                                       ".",   "+",   "-",  "*",  "/",  "<",  ">",  "="};
        for (const char* p : puncts) {
            size_t n = std::string(p).size();
            if (src.compare(pos, n, p) == 0) {
                t.kind = Tok::Punct;
                t.text = p;
                for (size_t i = 0; i < n; i++) advance();
                return t;
            }
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

struct Parser {
    std::vector<Token> toks;
    size_t idx = 0;
    int func_depth = 0;

    explicit Parser(const std::string& src) {
        Lexer lex(src);
        while (true) {
            Token t = lex.next();
            bool end = t.kind == Tok::End;
            toks.push_back(std::move(t));
            if (end) break;
        }
    }

    const Token& cur() const { return toks[idx]; }
    const Token& ahead(size_t n = 1) const {
        return toks[std::min(idx + n, toks.size() - 1)];
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ParseError::Kind::Syntax, msg, cur().line, cur().col);
    }

    [[noreturn]] void unsupported(const std::string& construct) const {
        throw ParseError(ParseError::Kind::UnsupportedFeature,
                         "unsupported feature: " + construct, cur().line, cur().col, construct);
    }

    bool at_punct(const std::string& p) const {
        return cur().kind == Tok::Punct && cur().text == p;
    }
    bool at_keyword(const std::string& k) const {
        return cur().kind == Tok::Keyword && cur().text == k;
    }

    Token take() { return toks[idx++]; }

    void expect_punct(const std::string& p) {
        if (!at_punct(p)) fail("expected '" + p + "' but found '" + cur().text + "'");
        idx++;
    }

    std::string expect_ident() {
        if (cur().kind != Tok::Ident) fail("expected an identifier, found '" + cur().text + "'");
        if (cur().text == "eval") unsupported("eval");
        if (cur().text == "Proxy") unsupported("proxy");
        if (cur().text == "env")
            fail("'env' is reserved for the tracing runtime and cannot be used in guest code");
        return take().text;
    }

    // ---- expressions -------------------------------------------------------

    ExprP parse_primary() {
        const Token& t = cur();
        if (t.kind == Tok::Number) {
            Token tok = take();
            return e_const(tok.value, tok.line, tok.col);
        }
        if (t.kind == Tok::String) {
            Token tok = take();
            return e_const(tok.value, tok.line, tok.col);
        }
        if (at_keyword("true")) {
            Token tok = take();
            return e_const(Scalar::boolean(true), tok.line, tok.col);
        }
        if (at_keyword("false")) {
            Token tok = take();
            return e_const(Scalar::boolean(false), tok.line, tok.col);
        }
        if (at_keyword("undefined")) {
            Token tok = take();
            return e_const(Scalar::undefined(), tok.line, tok.col);
        }
        if (at_punct("-")) {
            Token minus = take();
            // Unary minus: fold into negative literals, otherwise 0 - e.
            if (cur().kind == Tok::Number) {
                Token num = take();
                Scalar v = num.value;
                if (v.tag == Scalar::Tag::Int)
                    v.i = -v.i;
                else
                    v.f = -v.f;
                return e_const(v, minus.line, minus.col);
            }
            ExprP operand = parse_postfix();
            return e_binop("-", e_const(Scalar::integer(0)), operand, minus.line, minus.col);
        }
        if (at_punct("(")) {
            expect_punct("(");
            ExprP e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (at_punct("{")) return parse_object_literal();
        if (at_punct("[")) {
            Token open = take();
            std::vector<ExprP> items;
            while (!at_punct("]")) {
                if (!items.empty()) expect_punct(",");
                items.push_back(parse_expr());
            }
            expect_punct("]");
            return e_array(std::move(items), open.line, open.col);
        }
        if (t.kind == Tok::Ident) {
            int line = t.line, col = t.col;
            std::string name = expect_ident();
            return e_var(std::move(name), line, col);
        }
        if (at_keyword("function")) fail("function literals are only allowed on the right of a binding");
        fail("expected an expression, found '" + t.text + "'");
    }

    ExprP parse_object_literal() {
        Token open = take();  // '{'
        std::vector<std::pair<std::string, ExprP>> fields;
        while (!at_punct("}")) {
            if (!fields.empty()) expect_punct(",");
            if (cur().kind == Tok::Ident && (cur().text == "get" || cur().text == "set") &&
                ahead().kind == Tok::Ident) {
                unsupported(cur().text == "get" ? "getter" : "setter");
            }
            std::string key;
            if (cur().kind == Tok::Ident || cur().kind == Tok::Keyword) {
                key = take().text;
            } else if (cur().kind == Tok::String) {
                key = take().value.s;
            } else {
                fail("expected a field name in object literal");
            }
            expect_punct(":");
            fields.emplace_back(std::move(key), parse_expr());
        }
        expect_punct("}");
        return e_object(std::move(fields), open.line, open.col);
    }

    ExprP parse_postfix() {
        ExprP e = parse_primary();
        while (true) {
            if (at_punct(".")) {
                Token dot = take();
                if (cur().kind != Tok::Ident && cur().kind != Tok::Keyword)
                    fail("expected a field name after '.'");
                std::string field = take().text;
                e = e_member(std::move(e), std::move(field), dot.line, dot.col);
            } else if (at_punct("[")) {
                Token open = take();
                ExprP idx = parse_expr();
                expect_punct("]");
                e = e_index(std::move(e), std::move(idx), open.line, open.col);
            } else {
                break;
            }
        }
        return e;
    }

    ExprP parse_mul() {
        ExprP e = parse_postfix();
        while (at_punct("*") || at_punct("/")) {
            Token op = take();
            e = e_binop(op.text, std::move(e), parse_postfix(), op.line, op.col);
        }
        return e;
    }

    ExprP parse_add() {
        ExprP e = parse_mul();
        while (at_punct("+") || at_punct("-")) {
            Token op = take();
            e = e_binop(op.text, std::move(e), parse_mul(), op.line, op.col);
        }
        return e;
    }

    ExprP parse_rel() {
        ExprP e = parse_add();
        while (at_punct("<") || at_punct(">") || at_punct("<=") || at_punct(">=")) {
            Token op = take();
            e = e_binop(op.text, std::move(e), parse_add(), op.line, op.col);
        }
        return e;
    }

    ExprP parse_expr() {
        if (at_punct("==") || at_punct("!="))
            fail("loose equality is not supported; use '===' or '!=='");
        ExprP e = parse_rel();
        while (at_punct("===") || at_punct("!==")) {
            Token op = take();
            e = e_binop(op.text, std::move(e), parse_rel(), op.line, op.col);
        }
        if (at_punct("==") || at_punct("!="))
            fail("loose equality is not supported; use '===' or '!=='");
        return e;
    }

    // Call arguments may be function literals (desugaring hoists them).
    ExprP parse_call_arg() {
        if (at_keyword("function")) {
            Token kw = cur();
            FuncP f = parse_function_literal();
            return e_func(std::move(f), kw.line, kw.col);
        }
        if (is_arrow_ahead()) {
            Token t = cur();
            FuncP f = parse_arrow_literal();
            return e_func(std::move(f), t.line, t.col);
        }
        return parse_expr();
    }

    bool is_arrow_ahead() const {
        // ident => ...   |   ( ident, ... ) => ...
        if (cur().kind == Tok::Ident && ahead().kind == Tok::Punct && ahead().text == "=>")
            return true;
        if (!at_punct("(")) return false;
        size_t i = idx + 1;
        while (i < toks.size()) {
            const Token& t = toks[i];
            if (t.kind == Tok::Punct && t.text == ")") {
                return i + 1 < toks.size() && toks[i + 1].kind == Tok::Punct &&
                       toks[i + 1].text == "=>";
            }
            if (t.kind == Tok::Ident || (t.kind == Tok::Punct && t.text == ",")) {
                i++;
                continue;
            }
            return false;
        }
        return false;
    }

    // ---- functions ---------------------------------------------------------

    std::vector<std::string> parse_params() {
        expect_punct("(");
        std::vector<std::string> params;
        while (!at_punct(")")) {
            if (!params.empty()) expect_punct(",");
            params.push_back(expect_ident());
        }
        expect_punct(")");
        return params;
    }

    FuncP parse_function_literal() {
        // at 'function'
        take();
        if (cur().kind == Tok::Ident)
            fail("named function expressions are not supported; bind the function with 'let'");
        auto f = std::make_shared<FuncLit>();
        f->params = parse_params();
        func_depth++;
        f->body = parse_braced_block();
        func_depth--;
        return f;
    }

    FuncP parse_arrow_literal() {
        auto f = std::make_shared<FuncLit>();
        if (cur().kind == Tok::Ident) {
            f->params.push_back(expect_ident());
        } else {
            f->params = parse_params();
        }
        expect_punct("=>");
        if (!at_punct("{")) fail("arrow functions must have a braced body");
        func_depth++;
        f->body = parse_braced_block();
        func_depth--;
        return f;
    }

    std::vector<StmtP> parse_braced_block() {
        expect_punct("{");
        std::vector<StmtP> body;
        while (!at_punct("}")) body.push_back(parse_stmt());
        expect_punct("}");
        return body;
    }

    // ---- statements --------------------------------------------------------

    Binding parse_binding() {
        if (at_keyword("function")) {
            Binding b;
            b.kind = BindingKind::Func;
            b.func = parse_function_literal();
            return b;
        }
        if (is_arrow_ahead()) {
            Binding b;
            b.kind = BindingKind::Func;
            b.func = parse_arrow_literal();
            return b;
        }
        // Could be a call: postfix chain followed by '('.
        ExprP e = parse_expr();
        if (at_punct("(")) return parse_call_from(std::move(e));
        Binding b;
        b.kind = BindingKind::Expr;
        b.expr = std::move(e);
        return b;
    }

    Binding parse_call_from(ExprP callee) {
        if (callee->kind != ExprKind::Var && callee->kind != ExprKind::Member)
            fail("only named functions can be applied");
        expect_punct("(");
        Binding b;
        b.kind = BindingKind::Call;
        b.callee = std::move(callee);
        while (!at_punct(")")) {
            if (!b.args.empty()) expect_punct(",");
            b.args.push_back(parse_call_arg());
        }
        expect_punct(")");
        if (at_punct("(") || at_punct(".") || at_punct("["))
            fail("call results cannot be used directly; bind the call with 'let' first");
        return b;
    }

    StmtP finish(Stmt s) { return std::make_shared<const Stmt>(std::move(s)); }

    StmtP parse_stmt() {
        const Token& t = cur();
        Stmt s;
        s.line = t.line;
        s.col = t.col;

        if (at_keyword("let")) {
            take();
            s.kind = StmtKind::Let;
            s.name = expect_ident();
            expect_punct("=");
            s.binding = parse_binding();
            expect_punct(";");
            return finish(std::move(s));
        }
        if (at_keyword("function")) {
            // function f(...) { ... }  — declaration sugar for let f = function ...
            take();
            s.kind = StmtKind::FuncDecl;
            s.name = expect_ident();
            auto f = std::make_shared<FuncLit>();
            f->params = parse_params();
            func_depth++;
            f->body = parse_braced_block();
            func_depth--;
            s.binding.kind = BindingKind::Func;
            s.binding.func = std::move(f);
            return finish(std::move(s));
        }
        if (at_punct("{")) {
            s.kind = StmtKind::Block;
            s.block = parse_braced_block();
            return finish(std::move(s));
        }
        if (at_keyword("if")) {
            take();
            s.kind = StmtKind::If;
            expect_punct("(");
            s.cond = parse_expr();
            expect_punct(")");
            s.s1 = parse_stmt();
            if (at_keyword("else")) {
                take();
                s.s2 = parse_stmt();
            }
            return finish(std::move(s));
        }
        if (at_keyword("while")) {
            take();
            s.kind = StmtKind::While;
            expect_punct("(");
            s.cond = parse_expr();
            expect_punct(")");
            s.s1 = parse_stmt();
            return finish(std::move(s));
        }
        if (at_keyword("for")) {
            take();
            s.kind = StmtKind::For;
            expect_punct("(");
            s.init = parse_for_clause_stmt();
            s.cond = parse_expr();
            expect_punct(";");
            s.update = parse_for_update();
            expect_punct(")");
            s.s1 = parse_stmt();
            return finish(std::move(s));
        }
        if (at_keyword("break")) {
            take();
            s.kind = StmtKind::Break;
            if (at_punct(";")) fail("break requires a label in this language fragment");
            s.name = expect_ident();
            expect_punct(";");
            return finish(std::move(s));
        }
        if (at_keyword("return")) {
            if (func_depth == 0) fail("return outside of a function body");
            take();
            s.kind = StmtKind::Return;
            if (at_punct(";")) {
                s.cond = e_const(Scalar::undefined(), s.line, s.col);
            } else {
                s.cond = parse_expr();
            }
            expect_punct(";");
            return finish(std::move(s));
        }
        if (t.kind == Tok::Ident && ahead().kind == Tok::Punct && ahead().text == ":") {
            s.kind = StmtKind::Label;
            s.name = expect_ident();
            expect_punct(":");
            s.s1 = parse_stmt();
            return finish(std::move(s));
        }
        if (t.kind == Tok::Ident) {
            // assignment to an l-value, or a bare call statement
            ExprP e = parse_postfix();
            if (at_punct("(")) {
                s.kind = StmtKind::ExprStmt;
                s.binding = parse_call_from(std::move(e));
                expect_punct(";");
                return finish(std::move(s));
            }
            if (at_punct("=")) {
                take();
                s.kind = StmtKind::Assign;
                if (e->kind != ExprKind::Var && e->kind != ExprKind::Member &&
                    e->kind != ExprKind::Index)
                    fail("assignment target must be a variable, member, or index");
                s.lval = std::move(e);
                s.binding = parse_binding();
                expect_punct(";");
                return finish(std::move(s));
            }
            fail("expected '=', ':', or a call after this identifier; bare expression "
                 "statements are not allowed");
        }
        fail("expected a statement, found '" + t.text + "'");
    }

    StmtP parse_for_clause_stmt() {
        Stmt s;
        s.line = cur().line;
        s.col = cur().col;
        if (at_keyword("let")) {
            take();
            s.kind = StmtKind::Let;
            s.name = expect_ident();
            expect_punct("=");
            s.binding.kind = BindingKind::Expr;
            s.binding.expr = parse_expr();
            expect_punct(";");
            return finish(std::move(s));
        }
        s.kind = StmtKind::Assign;
        s.lval = parse_postfix();
        expect_punct("=");
        s.binding.kind = BindingKind::Expr;
        s.binding.expr = parse_expr();
        expect_punct(";");
        return finish(std::move(s));
    }

    StmtP parse_for_update() {
        Stmt s;
        s.line = cur().line;
        s.col = cur().col;
        s.kind = StmtKind::Assign;
        s.lval = parse_postfix();
        expect_punct("=");
        s.binding.kind = BindingKind::Expr;
        s.binding.expr = parse_expr();
        return finish(std::move(s));
    }

    Program parse_program() {
        Program p;
        while (cur().kind != Tok::End) p.body.push_back(parse_stmt());
        return p;
    }
};

}  // namespace

Program parse(const std::string& source) {
    Parser parser(source);
    return parser.parse_program();
}

}  // namespace accel::ast
