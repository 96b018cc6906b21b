#include "quiver/ddl.hpp"

#include "quiver/errors.hpp"

#include <cctype>
#include <charconv>

namespace quiver::ddl {

namespace {

enum class Tok {
    End,
    Ident,
    Number,
    Str,
    Minus,
    Arrow,  // ->
    LArrow, // <-
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Plus,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double num = 0;
    bool is_int = false;
    int64_t inum = 0;
    uint32_t line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorCode::ParseError, "line " + std::to_string(line_) + ":" +
                                        std::to_string(col_) + ": " + msg);
    }

    char at(size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

    void bump() {
        if (pos_ < text_.size()) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void advance() {
        while (pos_ < text_.size() &&
               (std::isspace(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == ';'))
            bump();
        current_ = Token{};
        current_.line = line_;
        current_.col = col_;
        if (pos_ >= text_.size()) return;
        const char c = text_[pos_];
        // Greek alpha (UTF-8 0xCE 0xB1) reads as the identifier "alpha".
        if (static_cast<unsigned char>(c) == 0xCE &&
            static_cast<unsigned char>(at(pos_ + 1)) == 0xB1) {
            bump();
            bump();
            current_.kind = Tok::Ident;
            current_.text = "alpha";
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_')) {
                word += text_[pos_];
                bump();
            }
            current_.kind = Tok::Ident;
            current_.text = word;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string word;
            bool is_float = false;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '.')) {
                // A dot not followed by a digit terminates the number (it is
                // a property access on something else, never valid anyway).
                if (text_[pos_] == '.') {
                    if (!std::isdigit(static_cast<unsigned char>(at(pos_ + 1)))) break;
                    is_float = true;
                }
                word += text_[pos_];
                bump();
            }
            current_.kind = Tok::Number;
            current_.text = word;
            current_.num = std::stod(word);
            current_.is_int = !is_float;
            if (!is_float) current_.inum = std::stoll(word);
            return;
        }
        if (c == '\'') {
            bump();
            std::string word;
            while (pos_ < text_.size() && text_[pos_] != '\'') {
                word += text_[pos_];
                bump();
            }
            if (pos_ >= text_.size()) error("unterminated string literal");
            bump();
            current_.kind = Tok::Str;
            current_.text = word;
            return;
        }
        auto two = [&](char a, char b) { return c == a && at(pos_ + 1) == b; };
        if (two('-', '>')) {
            bump();
            bump();
            current_.kind = Tok::Arrow;
            return;
        }
        if (two('<', '-')) {
            bump();
            bump();
            current_.kind = Tok::LArrow;
            return;
        }
        if (two('<', '=')) {
            bump();
            bump();
            current_.kind = Tok::Le;
            return;
        }
        if (two('>', '=')) {
            bump();
            bump();
            current_.kind = Tok::Ge;
            return;
        }
        if (two('!', '=') || two('<', '>')) {
            bump();
            bump();
            current_.kind = Tok::Ne;
            return;
        }
        switch (c) {
        case '-': current_.kind = Tok::Minus; break;
        case '[': current_.kind = Tok::LBracket; break;
        case ']': current_.kind = Tok::RBracket; break;
        case '(': current_.kind = Tok::LParen; break;
        case ')': current_.kind = Tok::RParen; break;
        case ',': current_.kind = Tok::Comma; break;
        case '.': current_.kind = Tok::Dot; break;
        case ':': current_.kind = Tok::Colon; break;
        case '+': current_.kind = Tok::Plus; break;
        case '=': current_.kind = Tok::Eq; break;
        case '<': current_.kind = Tok::Lt; break;
        case '>': current_.kind = Tok::Gt; break;
        case '&': current_.kind = Tok::Comma; break; // '&' means AND, like ','
        default: error(std::string("unexpected character '") + c + "'");
        }
        bump();
    }

    const std::string& text_;
    size_t pos_ = 0;
    uint32_t line_ = 1, col_ = 1;
    Token current_;
};

bool ieq(const std::string& a, const char* b) {
    size_t i = 0;
    for (; i < a.size() && b[i]; ++i)
        if (std::toupper(static_cast<unsigned char>(a[i])) !=
            std::toupper(static_cast<unsigned char>(b[i])))
            return false;
    return i == a.size() && b[i] == '\0';
}

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    Command parse_command() {
        const Token t = peek();
        if (t.kind != Tok::Ident) error(t, "expected a command keyword");
        if (ieq(t.text, "LOAD")) return parse_load();
        if (ieq(t.text, "EXPORT")) return parse_export();
        if (ieq(t.text, "RECONFIGURE")) return parse_reconfigure();
        if (ieq(t.text, "CREATE")) return parse_create();
        if (ieq(t.text, "DROP")) return parse_drop();
        if (ieq(t.text, "MATCH")) {
            Command c;
            c.type = Command::Type::Match;
            c.match = parse_match_clause();
            expect_end();
            return c;
        }
        if (ieq(t.text, "EXPLAIN")) {
            take();
            expect_kw("MATCH");
            Command c;
            c.type = Command::Type::Explain;
            c.match = parse_match_body();
            expect_end();
            return c;
        }
        if (ieq(t.text, "STATS")) {
            take();
            expect_end();
            Command c;
            c.type = Command::Type::Stats;
            return c;
        }
        if (ieq(t.text, "SHOW")) {
            take();
            expect_kw("INDEXES");
            expect_end();
            Command c;
            c.type = Command::Type::ShowIndexes;
            return c;
        }
        if (ieq(t.text, "FLUSH")) return parse_flush();
        if (ieq(t.text, "SET")) return parse_set();
        if (ieq(t.text, "QUIT") || ieq(t.text, "EXIT")) {
            take();
            Command c;
            c.type = Command::Type::Quit;
            return c;
        }
        if (ieq(t.text, "HELP")) {
            take();
            Command c;
            c.type = Command::Type::Help;
            return c;
        }
        error(t, "unknown command '" + t.text + "'");
    }

private:
    [[noreturn]] void error(const Token& t, const std::string& msg) {
        fail(ErrorCode::ParseError, "line " + std::to_string(t.line) + ":" +
                                        std::to_string(t.col) + ": " + msg);
    }

    const Token& peek() { return lex_.peek(); }
    Token take() { return lex_.take(); }

    bool peek_kw(const char* kw) {
        return peek().kind == Tok::Ident && ieq(peek().text, kw);
    }

    Token expect_kw(const char* kw) {
        const Token t = take();
        if (t.kind != Tok::Ident || !ieq(t.text, kw))
            error(t, std::string("expected ") + kw);
        return t;
    }

    Token expect(Tok kind, const char* what) {
        const Token t = take();
        if (t.kind != kind) error(t, std::string("expected ") + what);
        return t;
    }

    void expect_end() {
        const Token t = peek();
        if (t.kind != Tok::End) error(t, "unexpected trailing input");
    }

    std::string expect_path() {
        const Token t = take();
        if (t.kind != Tok::Str) error(t, "expected a quoted path");
        return t.text;
    }

    Command parse_load() {
        take();
        Command c;
        c.type = Command::Type::Load;
        expect_kw("VERTICES");
        c.vertex_file = expect_path();
        expect_kw("EDGES");
        c.edge_file = expect_path();
        if (peek_kw("SCHEMA")) {
            take();
            c.schema_file = expect_path();
        }
        expect_end();
        return c;
    }

    Command parse_export() {
        take();
        Command c;
        c.type = Command::Type::Export;
        expect_kw("VERTICES");
        c.vertex_file = expect_path();
        expect_kw("EDGES");
        c.edge_file = expect_path();
        expect_end();
        return c;
    }

    Command parse_drop() {
        take();
        Command c;
        c.type = Command::Type::DropIndex;
        expect_kw("INDEX");
        c.view_name = expect(Tok::Ident, "index name").text;
        expect_end();
        return c;
    }

    Command parse_flush() {
        take();
        Command c;
        c.type = Command::Type::Flush;
        if (peek_kw("INDEX")) {
            take();
            c.flush_index = expect(Tok::Ident, "index name").text;
        } else if (peek_kw("PAGE")) {
            take();
            c.flush_index = expect(Tok::Ident, "index name").text;
            c.flush_owner = expect(Tok::Number, "owner id").inum;
        }
        expect_end();
        return c;
    }

    Command parse_set() {
        take();
        Command c;
        c.type = Command::Type::Set;
        c.set_name = expect(Tok::Ident, "parameter name").text;
        expect(Tok::Eq, "=");
        const Token v = expect(Tok::Number, "numeric value");
        c.set_value = v.num;
        expect_end();
        return c;
    }

    Command parse_reconfigure() {
        take();
        Command c;
        c.type = Command::Type::ReconfigurePrimary;
        expect_kw("PRIMARY");
        expect_kw("INDEXES");
        parse_index_shape(c);
        expect_end();
        return c;
    }

    Command parse_create() {
        take();
        const Token hops = expect(Tok::Number, "1 or 2 (as in 1-HOP)");
        expect(Tok::Minus, "-");
        expect_kw("HOP");
        expect_kw("VIEW");
        Command c;
        c.type = hops.inum == 1 ? Command::Type::Create1Hop : Command::Type::Create2Hop;
        if (hops.inum != 1 && hops.inum != 2) error(hops, "only 1-HOP and 2-HOP views");
        c.view_name = expect(Tok::Ident, "view name").text;
        expect_kw("MATCH");
        c.match = parse_match_body();
        if (peek_kw("INDEX")) {
            take();
            expect_kw("AS");
            c.has_index_as = true;
            if (peek().kind == Tok::Ident &&
                (ieq(peek().text, "FW") || ieq(peek().text, "BW"))) {
                c.direction = take().text;
                for (auto& ch : c.direction)
                    ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
                if (peek().kind == Tok::Minus) {
                    take();
                    expect_kw("BW");
                    c.direction = "FW-BW";
                }
            }
            parse_index_shape(c);
        }
        expect_end();
        return c;
    }

    void parse_index_shape(Command& c) {
        if (peek_kw("PARTITION")) {
            take();
            expect_kw("BY");
            while (true) {
                CriterionText crit;
                crit.subject = expect(Tok::Ident, "e_adj or v_nbr").text;
                expect(Tok::Dot, ".");
                crit.prop = expect(Tok::Ident, "property name").text;
                c.partition_by.push_back(std::move(crit));
                if (peek().kind != Tok::Comma) break;
                take();
            }
        }
        if (peek_kw("SORT")) {
            take();
            expect_kw("BY");
            while (true) {
                CriterionText key;
                key.subject = expect(Tok::Ident, "e_adj or v_nbr").text;
                expect(Tok::Dot, ".");
                key.prop = expect(Tok::Ident, "property name").text;
                c.sort_by.push_back(std::move(key));
                if (peek().kind != Tok::Comma) break;
                take();
            }
        }
    }

    MatchClause parse_match_clause() {
        expect_kw("MATCH");
        return parse_match_body();
    }

    int node_index(MatchClause& m, const PatternNode& node) {
        for (size_t i = 0; i < m.nodes.size(); ++i) {
            if (m.nodes[i].name == node.name) {
                if (m.nodes[i].label.empty()) m.nodes[i].label = node.label;
                return static_cast<int>(i);
            }
        }
        m.nodes.push_back(node);
        return static_cast<int>(m.nodes.size()) - 1;
    }

    PatternNode parse_node() {
        PatternNode node;
        if (peek().kind == Tok::LParen) {
            take();
            node.name = expect(Tok::Ident, "vertex variable").text;
            if (peek().kind == Tok::Colon) {
                take();
                node.label = expect(Tok::Ident, "vertex label").text;
            }
            expect(Tok::RParen, ")");
            return node;
        }
        node.name = expect(Tok::Ident, "vertex variable").text;
        return node;
    }

    // Returns (name, label, forward).
    std::pair<PatternEdge, bool> parse_edge_body(bool forward) {
        PatternEdge edge;
        expect(Tok::LBracket, "[");
        if (peek().kind == Tok::Ident) edge.name = take().text;
        if (peek().kind == Tok::Colon) {
            take();
            if (peek().kind == Tok::Ident) edge.label = take().text;
        }
        expect(Tok::RBracket, "]");
        if (forward)
            expect(Tok::Arrow, "->");
        else
            expect(Tok::Minus, "-");
        return {edge, forward};
    }

    MatchClause parse_match_body() {
        MatchClause m;
        int anon = 0;
        while (true) {
            int prev = node_index(m, parse_node());
            while (peek().kind == Tok::Minus || peek().kind == Tok::LArrow) {
                const bool forward = peek().kind == Tok::Minus;
                take();
                auto [edge, fwd] = parse_edge_body(forward);
                const int next = node_index(m, parse_node());
                edge.from = fwd ? prev : next;
                edge.to = fwd ? next : prev;
                if (edge.name.empty()) edge.name = "_e" + std::to_string(anon++);
                m.edges.push_back(edge);
                prev = next;
            }
            if (peek().kind == Tok::Comma) {
                take();
                continue;
            }
            // A new path may start without a comma (as printed in some
            // multi-line listings).
            if (peek().kind == Tok::Ident && !peek_kw("WHERE") && !peek_kw("INDEX"))
                continue;
            break;
        }
        if (peek_kw("WHERE")) {
            take();
            parse_where(m);
        }
        return m;
    }

    Operand parse_operand() {
        const Token t = take();
        Operand op;
        switch (t.kind) {
        case Tok::Ident: {
            if (peek().kind == Tok::Dot) {
                take();
                op.kind = Operand::Kind::Ref;
                op.var = t.text;
                op.prop = expect(Tok::Ident, "property name").text;
            } else {
                op.kind = Operand::Kind::Word;
                op.text = t.text;
            }
            break;
        }
        case Tok::Number:
            op.kind = Operand::Kind::Number;
            op.num = t.num;
            op.is_int = t.is_int;
            op.inum = t.inum;
            break;
        case Tok::Str:
            op.kind = Operand::Kind::Str;
            op.text = t.text;
            break;
        default: error(t, "expected a value or property reference");
        }
        if (peek().kind == Tok::Plus) {
            take();
            const Token o = take();
            op.has_offset = true;
            if (o.kind == Tok::Number) {
                op.offset = o.num;
            } else if (o.kind == Tok::Ident) {
                op.offset_word = o.text;
            } else {
                error(o, "expected a number or parameter after '+'");
            }
        }
        return op;
    }

    std::optional<CmpOp> peek_cmp() {
        switch (peek().kind) {
        case Tok::Eq: return CmpOp::Eq;
        case Tok::Ne: return CmpOp::Ne;
        case Tok::Lt: return CmpOp::Lt;
        case Tok::Le: return CmpOp::Le;
        case Tok::Gt: return CmpOp::Gt;
        case Tok::Ge: return CmpOp::Ge;
        default: return std::nullopt;
        }
    }

    void parse_where(MatchClause& m) {
        while (true) {
            // One (possibly chained) comparison: a < b < c desugars to
            // a < b AND b < c.
            Operand lhs = parse_operand();
            bool any = false;
            while (auto cmp = peek_cmp()) {
                const Token at = take();
                Operand rhs = parse_operand();
                TextAtom atom;
                atom.lhs = lhs;
                atom.op = *cmp;
                atom.rhs = rhs;
                atom.line = at.line;
                atom.col = at.col;
                m.where.push_back(atom);
                lhs = rhs;
                any = true;
            }
            if (!any) fail(ErrorCode::ParseError, "expected a comparison in WHERE");
            if (peek().kind == Tok::Comma) {
                take();
                continue;
            }
            break;
        }
    }

    Lexer lex_;
};

} // namespace

Command parse(const std::string& text) {
    Parser parser(text);
    return parser.parse_command();
}

} // namespace quiver::ddl
