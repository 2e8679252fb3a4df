#include "java_lexer.h"

#include "esdp/errors.h"

#include <array>
#include <cctype>

namespace esdp::detail {

namespace {

constexpr std::array<std::string_view, 53> kKeywords = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
    "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp",
    "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
    "volatile", "while", "true", "false", "null",
};

// Longest first so that greedy matching works.
constexpr std::array<std::string_view, 37> kOperators = {
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@", "=",
    "<", ">", "!", "~", "?",
};
constexpr std::string_view kSingleOps = ":+-*/&|^%";

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            if (pos_ >= src_.size()) break;
            out.push_back(next());
        }
        Token end;
        end.kind = TokenKind::End;
        end.line = line_;
        end.column = col_;
        end.offset = src_.size();
        out.push_back(end);
        check_balance(out);
        return out;
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(int line, int col, const std::string& what) const {
        throw UnparsableSource(line, col, what);
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                int line = line_, col = col_;
                advance();
                advance();
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size()) fail(line, col, "unterminated block comment");
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, std::size_t start, int line, int col) const {
        Token t;
        t.kind = kind;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.line = line;
        t.column = col;
        t.offset = start;
        t.length = pos_ - start;
        return t;
    }

    Token next() {
        std::size_t start = pos_;
        int line = line_, col = col_;
        auto c = static_cast<unsigned char>(peek());

        if (ident_start(c)) {
            while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(peek()))) advance();
            return make(TokenKind::Ident, start, line, col);
        }
        if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            return number(start, line, col);
        }
        if (c == '"') {
            if (peek(1) == '"' && peek(2) == '"') return text_block(start, line, col);
            advance();
            while (true) {
                if (pos_ >= src_.size() || peek() == '\n') fail(line, col, "unterminated string literal");
                if (peek() == '\\') {
                    advance();
                    if (pos_ >= src_.size()) fail(line, col, "unterminated string literal");
                    advance();
                    continue;
                }
                if (peek() == '"') break;
                advance();
            }
            advance();
            return make(TokenKind::StringLit, start, line, col);
        }
        if (c == '\'') {
            advance();
            while (true) {
                if (pos_ >= src_.size() || peek() == '\n') fail(line, col, "unterminated character literal");
                if (peek() == '\\') {
                    advance();
                    if (pos_ >= src_.size()) fail(line, col, "unterminated character literal");
                    advance();
                    continue;
                }
                if (peek() == '\'') break;
                advance();
            }
            advance();
            return make(TokenKind::CharLit, start, line, col);
        }
        for (auto op : kOperators) {
            if (src_.substr(pos_, op.size()) == op) {
                for (std::size_t i = 0; i < op.size(); ++i) advance();
                return make(TokenKind::Op, start, line, col);
            }
        }
        if (kSingleOps.find(static_cast<char>(c)) != std::string_view::npos) {
            advance();
            return make(TokenKind::Op, start, line, col);
        }
        fail(line, col, std::string("unexpected character '") + static_cast<char>(c) + "'");
    }

    Token number(std::size_t start, int line, int col) {
        auto digit_like = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };
        bool floating = false;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'b' || peek(1) == 'B')) {
            advance();
            advance();
            while (digit_like(peek())) advance();
        } else {
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                floating = true;
                advance();
                while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
            } else if (peek() == '.' && !ident_start(static_cast<unsigned char>(peek(1))) && peek(1) != '.') {
                // "1." is a valid double literal
                floating = true;
                advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                floating = true;
                advance();
                if (peek() == '+' || peek() == '-') advance();
                if (!std::isdigit(static_cast<unsigned char>(peek()))) fail(line, col, "malformed exponent");
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            }
        }
        TokenKind kind = floating ? TokenKind::DoubleLit : TokenKind::IntLit;
        char suffix = peek();
        if (suffix == 'l' || suffix == 'L') {
            kind = TokenKind::LongLit;
            advance();
        } else if (suffix == 'f' || suffix == 'F') {
            kind = TokenKind::FloatLit;
            advance();
        } else if (suffix == 'd' || suffix == 'D') {
            kind = TokenKind::DoubleLit;
            advance();
        }
        if (ident_part(static_cast<unsigned char>(peek()))) fail(line, col, "malformed numeric literal");
        return make(kind, start, line, col);
    }

    Token text_block(std::size_t start, int line, int col) {
        for (int i = 0; i < 3; ++i) advance();
        while (true) {
            if (pos_ >= src_.size()) fail(line, col, "unterminated text block");
            if (peek() == '\\') {
                advance();
                if (pos_ < src_.size()) advance();
                continue;
            }
            if (peek() == '"' && peek(1) == '"' && peek(2) == '"') break;
            advance();
        }
        for (int i = 0; i < 3; ++i) advance();
        return make(TokenKind::StringLit, start, line, col);
    }

    static void check_balance(const std::vector<Token>& tokens) {
        std::vector<const Token*> stack;
        for (const auto& t : tokens) {
            if (t.kind != TokenKind::Op) continue;
            if (t.text == "(" || t.text == "[" || t.text == "{") {
                stack.push_back(&t);
            } else if (t.text == ")" || t.text == "]" || t.text == "}") {
                char open = t.text == ")" ? '(' : t.text == "]" ? '[' : '{';
                if (stack.empty() || stack.back()->text[0] != open) {
                    throw UnparsableSource(t.line, t.column, "unbalanced '" + t.text + "'");
                }
                stack.pop_back();
            }
        }
        if (!stack.empty()) {
            throw UnparsableSource(stack.back()->line, stack.back()->column,
                                   "unclosed '" + stack.back()->text + "'");
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace

std::vector<Token> tokenize_java(std::string_view source) {
    return Lexer(source).run();
}

bool is_java_keyword(std::string_view word) {
    for (auto k : kKeywords) {
        if (k == word) return true;
    }
    return false;
}

bool is_primitive_type(std::string_view word) {
    return word == "int" || word == "long" || word == "short" || word == "byte" || word == "char" ||
           word == "boolean" || word == "float" || word == "double" || word == "void";
}

} // namespace esdp::detail
