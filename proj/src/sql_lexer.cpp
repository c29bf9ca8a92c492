#include <cctype>

#include "xeo/sql.hpp"

namespace xeo {
namespace sql {

namespace {

struct Keyword {
  const char* word;
  Tok tok;
};

const Keyword kKeywords[] = {
    {"SELECT", Tok::KwSelect}, {"FROM", Tok::KwFrom},       {"WHERE", Tok::KwWhere},
    {"JOIN", Tok::KwJoin},     {"ON", Tok::KwOn},           {"GROUP", Tok::KwGroup},
    {"BY", Tok::KwBy},         {"HAVING", Tok::KwHaving},   {"ORDER", Tok::KwOrder},
    {"LIMIT", Tok::KwLimit},   {"AND", Tok::KwAnd},         {"OR", Tok::KwOr},
    {"NOT", Tok::KwNot},       {"IN", Tok::KwIn},           {"EXISTS", Tok::KwExists},
    {"BETWEEN", Tok::KwBetween}, {"LIKE", Tok::KwLike},     {"DISTINCT", Tok::KwDistinct},
    {"SUM", Tok::KwSum},       {"COUNT", Tok::KwCount},     {"MIN", Tok::KwMin},
    {"MAX", Tok::KwMax},       {"AVG", Tok::KwAvg},         {"YEAR", Tok::KwYear},
    {"TRUE", Tok::KwTrue},     {"FALSE", Tok::KwFalse},     {"NULL", Tok::KwNull},
    {"DATE", Tok::KwDate},     {"TIMESTAMP", Tok::KwTimestamp}, {"ASC", Tok::KwAsc},
};

std::string to_upper(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  size_t pos = 0;
  int line = 1, col = 1;

  auto advance = [&](size_t n) {
    for (size_t i = 0; i < n; ++i) {
      if (text[pos] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
      pos++;
    }
  };

  while (pos < text.size()) {
    char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }

    Token tok;
    tok.line = line;
    tok.col = col;

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
        advance(1);
      }
      tok.text = text.substr(start, pos - start);
      std::string up = to_upper(tok.text);
      tok.type = Tok::Ident;
      for (const auto& kw : kKeywords) {
        if (up == kw.word) {
          tok.type = kw.tok;
          break;
        }
      }
      out.push_back(tok);
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos;
      bool is_float = false;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) advance(1);
      if (pos < text.size() && text[pos] == '.') {
        is_float = true;
        advance(1);
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) advance(1);
      }
      if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        is_float = true;
        advance(1);
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) advance(1);
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) advance(1);
      }
      tok.text = text.substr(start, pos - start);
      tok.type = is_float ? Tok::FloatLit : Tok::IntLit;
      out.push_back(tok);
      continue;
    }

    if (c == '\'') {
      advance(1);
      std::string s;
      bool closed = false;
      while (pos < text.size()) {
        if (text[pos] == '\'') {
          if (pos + 1 < text.size() && text[pos + 1] == '\'') {
            s += '\'';
            advance(2);
            continue;
          }
          advance(1);
          closed = true;
          break;
        }
        s += text[pos];
        advance(1);
      }
      if (!closed) throw ParseError("unterminated string literal", tok.line, tok.col);
      tok.type = Tok::StringLit;
      tok.text = s;
      out.push_back(tok);
      continue;
    }

    auto two = [&](char a, char b) {
      return c == a && pos + 1 < text.size() && text[pos + 1] == b;
    };

    if (two('<', '=')) { tok.type = Tok::Le; advance(2); }
    else if (two('>', '=')) { tok.type = Tok::Ge; advance(2); }
    else if (two('<', '>')) { tok.type = Tok::Neq; advance(2); }
    else if (two('!', '=')) { tok.type = Tok::Neq; advance(2); }
    else if (c == '<') { tok.type = Tok::Lt; advance(1); }
    else if (c == '>') { tok.type = Tok::Gt; advance(1); }
    else if (c == '=') { tok.type = Tok::Eq; advance(1); }
    else if (c == ',') { tok.type = Tok::Comma; advance(1); }
    else if (c == '.') { tok.type = Tok::Dot; advance(1); }
    else if (c == '(') { tok.type = Tok::LParen; advance(1); }
    else if (c == ')') { tok.type = Tok::RParen; advance(1); }
    else if (c == '*') { tok.type = Tok::Star; advance(1); }
    else if (c == '+') { tok.type = Tok::Plus; advance(1); }
    else if (c == '-') { tok.type = Tok::Minus; advance(1); }
    else if (c == '/') { tok.type = Tok::Slash; advance(1); }
    else if (c == ';') { tok.type = Tok::Semicolon; advance(1); }
    else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(tok);
  }

  Token end;
  end.type = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

}  // namespace sql
}  // namespace xeo
