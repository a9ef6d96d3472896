#pragma once

// Tokenizer shared by the formula parser and the ISPL front end.
// `--` starts a comment that runs to the end of the line.

#include "epimc/error.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace epimc::text {

enum class TokenKind : std::uint8_t {
    Ident,
    Number,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semicolon,
    Colon,
    Comma,
    Equals,
    Dot,
    Arrow,
    Invalid,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    int line = 1;
    int column = 1;
};

std::string describe(TokenKind kind);
std::string describe(const Token& tok);

std::vector<Token> tokenize(std::string_view source);

// Syntax error with a 1-based source position and the tokens that would have
// been accepted there.
class ParseError : public Error {
public:
    ParseError(std::string message, int line, int column, std::vector<std::string> expected = {});

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }
    const std::string& bare_message() const noexcept { return bare_; }

private:
    std::string bare_;
    int line_;
    int column_;
    std::vector<std::string> expected_;
};

// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens);

    const Token& peek(std::size_t ahead = 0) const;
    Token next();
    bool at(TokenKind kind) const { return peek().kind == kind; }
    bool at_word(std::string_view word) const;
    bool accept(TokenKind kind);
    bool accept_word(std::string_view word);
    Token expect(TokenKind kind);
    Token expect_word(std::string_view word);

    [[noreturn]] void fail(std::vector<std::string> expected) const;
    [[noreturn]] void fail_at(const Token& tok, std::string message) const;

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace epimc::text
