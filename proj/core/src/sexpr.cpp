#include "cdplus/sexpr.hpp"

#include <cctype>

namespace cdplus {

const SExpr* SExpr::kw(std::string_view name) const {
  for (std::size_t i = 0; i + 1 < items.size(); ++i)
    if (items[i].kind == Kind::Keyword && items[i].text == name) return &items[i + 1];
  return nullptr;
}

std::vector<const SExpr*> SExpr::tail_args() const {
  std::vector<const SExpr*> out;
  for (std::size_t i = 1; i < items.size(); ++i) out.push_back(&items[i]);
  return out;
}

namespace {

struct Lexer {
  std::string_view src;
  std::size_t i = 0;
  int line = 1, col = 1;

  char peek(std::size_t ahead = 0) const {
    return i + ahead < src.size() ? src[i + ahead] : '\0';
  }
  bool done() const { return i >= src.size(); }

  void advance() {
    if (done()) return;
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }

  void skip_ws() {
    while (!done()) {
      char c = peek();
      if (c == ';') {
        while (!done() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(Errc::SyntaxError, msg, line, col);
  }

  static bool sym_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '+' ||
           c == '*' || c == '/' || c == '.' || c == '<' || c == '>' || c == '=' || c == '!' ||
           c == '\'';
  }

  SExpr read_atom() {
    SourcePos pos{line, col};
    char c = peek();
    if (c == '"') {
      advance();
      std::string out;
      while (!done() && peek() != '"') {
        char d = peek();
        if (d == '\\') {
          advance();
          char e = peek();
          if (e == 'n') out += '\n';
          else if (e == 't') out += '\t';
          else if (e == '"') out += '"';
          else if (e == '\\') out += '\\';
          else fail("unknown escape in string");
          advance();
        } else {
          out += d;
          advance();
        }
      }
      if (done()) fail("unterminated string");
      advance();
      SExpr s = SExpr::string(std::move(out));
      s.pos = pos;
      return s;
    }
    if (c == ':') {
      advance();
      std::string out;
      while (!done() && sym_char(peek())) {
        out += peek();
        advance();
      }
      if (out.empty()) fail("empty keyword");
      SExpr s = SExpr::keyword(std::move(out));
      s.pos = pos;
      return s;
    }
    if (c == '#') {
      advance();
      std::string out;
      while (!done() && sym_char(peek())) {
        out += peek();
        advance();
      }
      if (out.empty()) fail("empty label reference");
      SExpr s = SExpr::labelref(std::move(out));
      s.pos = pos;
      return s;
    }
    // number?
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      std::string out;
      if (c == '-') {
        out += c;
        advance();
      }
      while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
        out += peek();
        advance();
      }
      SExpr s = SExpr::integer(std::stoll(out));
      s.pos = pos;
      return s;
    }
    // symbol; may start with ? or @, may carry a parenthesized parameter: Tool(X)
    std::string out;
    if (c == '?' || c == '@') {
      out += c;
      advance();
    }
    while (!done() && sym_char(peek())) {
      out += peek();
      advance();
    }
    if (out.empty() || out == "?" || out == "@") fail("unexpected character");
    if (peek() == '(') {
      // Immediately attached parameter, e.g. Tool(X).
      std::string param;
      advance();
      while (!done() && sym_char(peek())) {
        param += peek();
        advance();
      }
      if (peek() != ')') fail("unterminated entity parameter");
      if (param.empty()) fail("empty entity parameter");
      advance();
      out += "(" + param + ")";
    }
    SExpr s = SExpr::symbol(std::move(out));
    s.pos = pos;
    return s;
  }

  SExpr read_form() {
    skip_ws();
    if (done()) fail("unexpected end of input");
    SourcePos pos{line, col};
    if (peek() == '(') {
      advance();
      SExpr list = SExpr::list({});
      list.pos = pos;
      while (true) {
        skip_ws();
        if (done()) throw ParseError(Errc::SyntaxError, "unclosed list", pos.line, pos.col);
        if (peek() == ')') {
          advance();
          return list;
        }
        list.items.push_back(read_form());
      }
    }
    if (peek() == ')') fail("unexpected )");
    return read_atom();
  }
};

void write_rec(const SExpr& e, std::string& out) {
  switch (e.kind) {
    case SExpr::Kind::Symbol: out += e.text; break;
    case SExpr::Kind::Keyword: out += ":" + e.text; break;
    case SExpr::Kind::LabelRef: out += "#" + e.text; break;
    case SExpr::Kind::Int: out += std::to_string(e.num); break;
    case SExpr::Kind::String: {
      out += '"';
      for (char c : e.text) {
        if (c == '"') out += "\\\"";
        else if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else if (c == '\t') out += "\\t";
        else out += c;
      }
      out += '"';
      break;
    }
    case SExpr::Kind::List: {
      out += '(';
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += ' ';
        write_rec(e.items[i], out);
      }
      out += ')';
      break;
    }
  }
}

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) {
  Lexer lx{text};
  std::vector<SExpr> out;
  while (true) {
    lx.skip_ws();
    if (lx.done()) break;
    out.push_back(lx.read_form());
  }
  return out;
}

std::string write_sexpr(const SExpr& e) {
  std::string out;
  write_rec(e, out);
  return out;
}

}  // namespace cdplus
