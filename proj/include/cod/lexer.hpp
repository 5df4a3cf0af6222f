#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "cod/diagnostics.hpp"

namespace cod {

enum class Tok {
    Ident,
    Nat,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Minus,
    CmpLe,
    CmpLt,
    CmpEq,
    CmpGt,
    CmpGe,
    Eof,
    Bad,
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    long long value = 0;  // for Nat
    SourcePos pos;
};

// Tokenizes the whole input. Never throws: unrecognized bytes become Bad
// tokens the parser reports as syntax errors.
inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    SourcePos pos;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                pos.line++;
                pos.col = 1;
            } else {
                pos.col++;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.pos = pos;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                j++;
            t.kind = Tok::Ident;
            t.text = src.substr(i, j - i);
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            long long v = 0;
            bool overflow = false;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                v = v * 10 + (src[j] - '0');
                if (v > 1000000000LL) overflow = true;
                j++;
            }
            t.kind = overflow ? Tok::Bad : Tok::Nat;
            t.text = src.substr(i, j - i);
            t.value = v;
            advance(j - i);
        } else {
            auto two = [&](char a, char b) {
                return c == a && i + 1 < src.size() && src[i + 1] == b;
            };
            if (two('<', '=')) {
                t.kind = Tok::CmpLe;
                t.text = "<=";
                advance(2);
            } else if (two('>', '=')) {
                t.kind = Tok::CmpGe;
                t.text = ">=";
                advance(2);
            } else if (two('=', '=')) {
                t.kind = Tok::CmpEq;
                t.text = "==";
                advance(2);
            } else {
                switch (c) {
                    case '{': t.kind = Tok::LBrace; break;
                    case '}': t.kind = Tok::RBrace; break;
                    case '(': t.kind = Tok::LParen; break;
                    case ')': t.kind = Tok::RParen; break;
                    case ';': t.kind = Tok::Semi; break;
                    case ',': t.kind = Tok::Comma; break;
                    case '-': t.kind = Tok::Minus; break;
                    case '<': t.kind = Tok::CmpLt; break;
                    case '>': t.kind = Tok::CmpGt; break;
                    case '=': t.kind = Tok::CmpEq; break;
                    default: t.kind = Tok::Bad; break;
                }
                t.text = std::string(1, c);
                advance(1);
            }
        }
        out.push_back(std::move(t));
    }
    Token eof;
    eof.kind = Tok::Eof;
    eof.pos = pos;
    out.push_back(eof);
    return out;
}

}  // namespace cod
