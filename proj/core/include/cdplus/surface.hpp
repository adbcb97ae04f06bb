#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdplus/cdx.hpp"
#include "cdplus/matcher.hpp"

namespace cdplus {

enum class Illocution : uint8_t { Directive, Inform, WhyQuestion, Answer };
enum class Tone : uint8_t { Neutral, Polite };

const char* illoc_name(Illocution) noexcept;
std::optional<Illocution> parse_illoc(std::string_view);
const char* tone_name(Tone) noexcept;

struct Template {
  std::string id;  // T1..T6
  Illocution illoc = Illocution::Inform;
  std::optional<Tone> tone;  // set on tone-specific templates
  Pattern pattern;
  std::string text;  // schema with {slot} holes
};

struct RealizeResult {
  std::string text;
  std::string template_id;
};

struct RecognizeResult {
  CzId cz;
  Illocution illoc = Illocution::Inform;
  std::string template_id;
};

// Straight-quote and whitespace normalization applied before matching.
std::string normalize_utterance(std::string_view);

class TemplateTable {
public:
  static TemplateTable load(const CdxDocument&);

  // Exact template text for a conceptualization; NoTemplate when nothing
  // matches, AmbiguousTemplate when the table itself is at fault.
  RealizeResult realize(const Store&, CzId, Tone, const MatchContext&) const;

  // Inverse mapping; nullopt for template gaps (callers log a heard event).
  std::optional<RecognizeResult> recognize(std::string_view text, Store&,
                                           const MatchContext&) const;

  std::string surface_word(const std::string& entity_text) const;
  const std::vector<Template>& templates() const { return templates_; }

private:
  std::vector<Template> templates_;
  std::vector<std::pair<std::string, std::string>> lexicon_;  // entity text -> word

  std::optional<std::string> entity_for_word(const std::string& word) const;
  friend struct TemplateTableTestAccess;
};

}  // namespace cdplus
