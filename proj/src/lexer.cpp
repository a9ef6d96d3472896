#include "epimc/lexer.hpp"

#include <cctype>

namespace epimc::text {

std::string describe(TokenKind kind)
{
    switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Comma: return "','";
    case TokenKind::Equals: return "'='";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::Invalid: return "invalid character";
    case TokenKind::End: return "end of input";
    }
    return "token";
}

std::string describe(const Token& tok)
{
    switch (tok.kind) {
    case TokenKind::Ident:
    case TokenKind::Number:
        return "'" + tok.text + "'";
    case TokenKind::Invalid: {
        std::string shown;
        for (unsigned char ch : tok.text) {
            if (std::isprint(ch)) {
                shown += static_cast<char>(ch);
            } else {
                static const char* hex = "0123456789abcdef";
                shown += "\\x";
                shown += hex[ch >> 4];
                shown += hex[ch & 15];
            }
        }
        return "invalid character '" + shown + "'";
    }
    default:
        return describe(tok.kind);
    }
}

std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto is_ident_start = [](unsigned char c) { return std::isalpha(c) || c == '_'; };
    auto is_ident = [](unsigned char c) { return std::isalnum(c) || c == '_'; };

    while (i < src.size()) {
        const auto c = static_cast<unsigned char>(src[i]);
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        Token tok;
        tok.line = line;
        tok.column = col;
        std::size_t len = 1;
        if (c < 128 && is_ident_start(c)) {
            while (i + len < src.size() && static_cast<unsigned char>(src[i + len]) < 128 &&
                   is_ident(static_cast<unsigned char>(src[i + len])))
                ++len;
            tok.kind = TokenKind::Ident;
        } else if (c < 128 && std::isdigit(c)) {
            while (i + len < src.size() && std::isdigit(static_cast<unsigned char>(src[i + len])))
                ++len;
            tok.kind = TokenKind::Number;
        } else {
            switch (c) {
            case '{': tok.kind = TokenKind::LBrace; break;
            case '}': tok.kind = TokenKind::RBrace; break;
            case '(': tok.kind = TokenKind::LParen; break;
            case ')': tok.kind = TokenKind::RParen; break;
            case ';': tok.kind = TokenKind::Semicolon; break;
            case ':': tok.kind = TokenKind::Colon; break;
            case ',': tok.kind = TokenKind::Comma; break;
            case '=': tok.kind = TokenKind::Equals; break;
            case '.': tok.kind = TokenKind::Dot; break;
            case '-':
                if (i + 1 < src.size() && src[i + 1] == '>') {
                    tok.kind = TokenKind::Arrow;
                    len = 2;
                } else {
                    tok.kind = TokenKind::Invalid;
                }
                break;
            default:
                tok.kind = TokenKind::Invalid;
            }
        }
        tok.text = std::string(src.substr(i, len));
        advance(len);
        out.push_back(std::move(tok));
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

namespace {

std::string format_message(const std::string& message, int line, int column)
{
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

} // namespace

ParseError::ParseError(std::string message, int line, int column, std::vector<std::string> expected)
    : Error(format_message(message, line, column)),
      bare_(std::move(message)),
      line_(line),
      column_(column),
      expected_(std::move(expected))
{
}

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens))
{
    if (tokens_.empty() || tokens_.back().kind != TokenKind::End)
        tokens_.push_back(Token{});
}

const Token& TokenStream::peek(std::size_t ahead) const
{
    const auto idx = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
}

Token TokenStream::next()
{
    Token t = peek();
    if (pos_ + 1 < tokens_.size())
        ++pos_;
    return t;
}

bool TokenStream::at_word(std::string_view word) const
{
    return peek().kind == TokenKind::Ident && peek().text == word;
}

bool TokenStream::accept(TokenKind kind)
{
    if (!at(kind))
        return false;
    next();
    return true;
}

bool TokenStream::accept_word(std::string_view word)
{
    if (!at_word(word))
        return false;
    next();
    return true;
}

Token TokenStream::expect(TokenKind kind)
{
    if (!at(kind))
        fail({describe(kind)});
    return next();
}

Token TokenStream::expect_word(std::string_view word)
{
    if (!at_word(word))
        fail({"'" + std::string(word) + "'"});
    return next();
}

void TokenStream::fail(std::vector<std::string> expected) const
{
    const Token& tok = peek();
    std::string msg = "unexpected " + describe(tok);
    if (!expected.empty()) {
        msg += ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i)
                msg += i + 1 == expected.size() ? " or " : ", ";
            msg += expected[i];
        }
    }
    throw ParseError(msg, tok.line, tok.column, std::move(expected));
}

void TokenStream::fail_at(const Token& tok, std::string message) const
{
    throw ParseError(std::move(message), tok.line, tok.column);
}

} // namespace epimc::text
