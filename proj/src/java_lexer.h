#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace esdp::detail {

enum class TokenKind { Ident, IntLit, LongLit, FloatLit, DoubleLit, CharLit, StringLit, Op, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    int line = 1;
    int column = 1;
    std::size_t offset = 0;
    std::size_t length = 0;
};

/// Tokenizes Java source. `>` is always emitted as a single-character token so
/// that nested generic arguments close correctly; the parser re-joins shift
/// operators by adjacency. Throws UnparsableSource on lexical failure and on
/// unbalanced brackets.
std::vector<Token> tokenize_java(std::string_view source);

bool is_java_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);

} // namespace esdp::detail
