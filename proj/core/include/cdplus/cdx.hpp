#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdplus/cdgraph.hpp"
#include "cdplus/sexpr.hpp"

namespace cdplus {

// A parsed .cdx document: validated, normalized top-level forms.
// Structural equality is canonical-serialization equality.
struct CdxDocument {
  std::vector<SExpr> items;

  bool operator==(const CdxDocument& other) const;
};

struct Diagnostic {
  Errc code;
  std::string message;
  SourcePos pos;
};

// Strict parse: throws ParseError (SyntaxError / UnknownAct / UnknownState /
// DanglingLabelRef / LabelClash) with source position.
CdxDocument parse(std::string_view text);

// Deterministic pretty-printer; parse(serialize(doc)) is structurally equal
// to doc, and serialize is a fixpoint over its own output.
std::string serialize(const CdxDocument&);

// Lenient pass for tooling: hard syntax errors still throw, label problems
// and grounding gaps come back as diagnostics.
std::vector<Diagnostic> validate(std::string_view text);

// --- building documents into stores ------------------------------------------

struct DocBuild {
  std::map<std::string, CzId> labels;
  std::vector<CzId> top_czs;   // top-level cz items, in document order
  std::vector<LinkId> links;
};

// Loads cz/link/elab/anchor items; rule/template/scenario sections are
// handled by their own loaders and skipped here.
DocBuild build_into_store(const CdxDocument&, Store&, bool fresh_czs = true);
void build_item(Store&, const SExpr& item, DocBuild&, bool fresh_czs);

// Builds one cz form (labels resolved against the given map).
CzId build_cz(Store&, const SExpr& form, std::map<std::string, CzId>& labels, bool fresh);

// --- wire helpers --------------------------------------------------------------

// Normalized, label-free form used for message payloads and traces.
SExpr cz_to_sexpr(const Store&, CzId);
std::string cz_to_text(const Store&, CzId);
CzId cz_from_text(Store&, std::string_view);  // find_or_assert ingestion

}  // namespace cdplus
