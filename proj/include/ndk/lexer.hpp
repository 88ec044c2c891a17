#pragma once

#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ndk {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, std::set<std::string> expected, std::string found)
      : std::runtime_error(format(line, col, expected, found)),
        line(line),
        col(col),
        expected(std::move(expected)),
        found(std::move(found)) {}

  int line;
  int col;
  std::set<std::string> expected;
  std::string found;

 private:
  static std::string format(int line, int col, const std::set<std::string>& expected, const std::string& found) {
    std::string out = "line " + std::to_string(line) + ", col " + std::to_string(col) + ": expected ";
    if (expected.size() == 1) {
      out += *expected.begin();
    } else {
      out += "one of {";
      bool first = true;
      for (const auto& e : expected) {
        if (!first) out += ", ";
        out += e;
        first = false;
      }
      out += "}";
    }
    return out + ", found " + found;
  }
};

struct Token {
  enum class Kind { Ident, Number, Sym, End };
  Kind kind;
  std::string text;
  int line;
  int col;

  bool is(std::string_view s) const { return kind != Kind::End && text == s; }
  std::string describe() const {
    if (kind == Kind::End) return "end of input";
    return "'" + text + "'";
  }
};

/// Tokenizer shared by the proof-term, formula and λ-term grammars.
/// Identifiers are letters, digits and underscores starting with a letter,
/// optionally followed by primes. `#` followed by a digit is a numeral
/// prefix; any other `#` starts a comment running to the end of the line.
inline std::vector<Token> tokenize(std::string_view src, int line = 1) {
  static const char* kSyms[] = {"|-", "->", "/\\", "_|_", "\\", "(", ")", "<", ">", ",", ".", ":",
                                "&",  "|",  "{",   "}",   "[",  "]", "+", "*", "#", "λ"};
  std::vector<Token> out;
  int col = 1;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (c == '#' && !(i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      while (j < src.size() && src[j] == '\'') ++j;
      out.push_back({Token::Kind::Ident, std::string(src.substr(i, j - i)), line, col});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Token::Kind::Number, std::string(src.substr(i, j - i)), line, col});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    bool matched = false;
    for (const char* s : kSyms) {
      std::string_view sv(s);
      if (src.substr(i, sv.size()) == sv) {
        out.push_back({Token::Kind::Sym, std::string(sv), line, col});
        i += sv.size();
        col += sv == "λ" ? 1 : static_cast<int>(sv.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(line, col, {"a token"}, "'" + std::string(1, c) + "'");
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

/// Cursor over a token vector with error reporting.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(std::string_view s) {
    if (peek().kind == Token::Kind::Sym && peek().text == s) {
      next();
      return true;
    }
    return false;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail({"'" + std::string(s) + "'"});
  }
  std::string ident() {
    if (peek().kind != Token::Kind::Ident) fail({"identifier"});
    return next().text;
  }
  bool atEnd() const { return peek().kind == Token::Kind::End; }

  [[noreturn]] void fail(std::set<std::string> expected) const {
    throw ParseError(peek().line, peek().col, std::move(expected), peek().describe());
  }
  [[noreturn]] void failAt(const Token& t, std::set<std::string> expected) const {
    throw ParseError(t.line, t.col, std::move(expected), t.describe());
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace ndk
