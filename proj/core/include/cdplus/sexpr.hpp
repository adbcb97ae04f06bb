#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdplus/errors.hpp"

namespace cdplus {

struct SourcePos {
  int line = 1;
  int col = 1;
};

// Minimal s-expression node. Entity atoms like Tool(X) lex as one symbol.
struct SExpr {
  enum class Kind { Symbol, String, Int, Keyword, LabelRef, List };

  Kind kind = Kind::List;
  std::string text;  // symbol text / string value / keyword name (no ':') / label (no '#')
  long long num = 0;
  std::vector<SExpr> items;
  SourcePos pos;

  static SExpr symbol(std::string s) { return SExpr{Kind::Symbol, std::move(s), 0, {}, {}}; }
  static SExpr string(std::string s) { return SExpr{Kind::String, std::move(s), 0, {}, {}}; }
  static SExpr integer(long long n) { return SExpr{Kind::Int, {}, n, {}, {}}; }
  static SExpr keyword(std::string s) { return SExpr{Kind::Keyword, std::move(s), 0, {}, {}}; }
  static SExpr labelref(std::string s) { return SExpr{Kind::LabelRef, std::move(s), 0, {}, {}}; }
  static SExpr list(std::vector<SExpr> xs) { return SExpr{Kind::List, {}, 0, std::move(xs), {}}; }

  bool is_sym(std::string_view s) const { return kind == Kind::Symbol && text == s; }
  bool is_list() const { return kind == Kind::List; }

  // Head symbol of a list form, empty when not applicable.
  std::string_view head() const {
    if (is_list() && !items.empty() && items[0].kind == Kind::Symbol) return items[0].text;
    return {};
  }

  // Value following keyword :name inside this list, if any.
  const SExpr* kw(std::string_view name) const;
  // All values following repeated keyword occurrences (not used by core forms).
  std::vector<const SExpr*> tail_args() const;
};

// Parses a whole buffer into top-level forms. Throws ParseError (SyntaxError).
std::vector<SExpr> parse_sexprs(std::string_view text);

// Deterministic single-line rendering (spaces between items, no indentation).
std::string write_sexpr(const SExpr&);

}  // namespace cdplus
