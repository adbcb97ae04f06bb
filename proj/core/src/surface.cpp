#include "cdplus/surface.hpp"

#include <algorithm>

namespace cdplus {

const char* illoc_name(Illocution i) noexcept {
  switch (i) {
    case Illocution::Directive: return "directive";
    case Illocution::Inform: return "inform";
    case Illocution::WhyQuestion: return "why-question";
    case Illocution::Answer: return "answer";
  }
  return "?";
}

std::optional<Illocution> parse_illoc(std::string_view s) {
  if (s == "directive") return Illocution::Directive;
  if (s == "inform") return Illocution::Inform;
  if (s == "why-question") return Illocution::WhyQuestion;
  if (s == "answer") return Illocution::Answer;
  return std::nullopt;
}

const char* tone_name(Tone t) noexcept { return t == Tone::Polite ? "polite" : "neutral"; }

std::string normalize_utterance(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size();) {
    unsigned char c = in[i];
    // U+2018/U+2019 -> ', U+201C/U+201D -> "
    if (c == 0xE2 && i + 2 < in.size() && static_cast<unsigned char>(in[i + 1]) == 0x80) {
      unsigned char third = in[i + 2];
      if (third == 0x98 || third == 0x99) {
        out += '\'';
        i += 3;
        continue;
      }
      if (third == 0x9C || third == 0x9D) {
        out += '"';
        i += 3;
        continue;
      }
    }
    if (std::isspace(c)) {
      if (!out.empty() && out.back() != ' ') out += ' ';
      ++i;
      continue;
    }
    out += static_cast<char>(c);
    ++i;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

namespace {

struct Segment {
  bool is_slot = false;
  std::string text;  // literal text or slot name
};

std::vector<Segment> split_schema(const std::string& schema) {
  std::vector<Segment> out;
  std::string lit;
  for (std::size_t i = 0; i < schema.size();) {
    if (schema[i] == '{') {
      auto close = schema.find('}', i);
      if (close == std::string::npos) raise(Errc::SyntaxError, "unclosed { in template text");
      if (!lit.empty()) {
        out.push_back(Segment{false, lit});
        lit.clear();
      }
      out.push_back(Segment{true, schema.substr(i + 1, close - i - 1)});
      i = close + 1;
    } else {
      lit += schema[i++];
    }
  }
  if (!lit.empty()) out.push_back(Segment{false, lit});
  return out;
}

void collect_vars(const Pattern& p, std::vector<std::string>& entity_vars) {
  auto add = [&](const EntityTerm& t) {
    if (t.kind == EntityTerm::Kind::Var) entity_vars.push_back(t.text);
  };
  add(p.actor);
  if (p.object.kind == ObjectPattern::Kind::Entity) add(p.object.entity);
  if (p.object.kind == ObjectPattern::Kind::Cz) collect_vars(*p.object.cz, entity_vars);
  if (p.from) add(*p.from);
  if (p.to) add(*p.to);
  if (p.instrument) add(*p.instrument);
}

}  // namespace

TemplateTable TemplateTable::load(const CdxDocument& doc) {
  TemplateTable table;
  for (const SExpr& item : doc.items) {
    if (item.head() == "template") {
      Template t;
      t.id = item.kw("id")->text;
      t.illoc = *parse_illoc(item.kw("illoc")->text);
      if (const SExpr* tone = item.kw("tone"))
        t.tone = tone->text == "polite" ? Tone::Polite : Tone::Neutral;
      t.pattern = pattern_from_sexpr(*item.kw("pattern"));
      t.text = item.kw("text")->text;
      table.templates_.push_back(std::move(t));
    } else if (item.head() == "lexeme") {
      table.lexicon_.emplace_back(item.items[1].text, item.items[2].text);
    }
  }
  return table;
}

std::string TemplateTable::surface_word(const std::string& entity_text) const {
  for (const auto& [entity, word] : lexicon_)
    if (entity == entity_text) return word;
  return entity_text;
}

std::optional<std::string> TemplateTable::entity_for_word(const std::string& word) const {
  for (const auto& [entity, w] : lexicon_)
    if (w == word) return entity;
  return std::nullopt;
}

RealizeResult TemplateTable::realize(const Store& store, CzId cz, Tone tone,
                                     const MatchContext& ctx) const {
  const Template* found = nullptr;
  Bindings binds;
  for (const Template& t : templates_) {
    if (t.tone && *t.tone != tone) continue;
    auto b = unify(t.pattern, store, cz, ctx);
    if (!b) continue;
    if (found)
      raise(Errc::AmbiguousTemplate,
            "conceptualization matches " + found->id + " and " + t.id);
    found = &t;
    binds = std::move(*b);
  }
  if (!found) raise(Errc::NoTemplate, "no surface template for " + store.canonicalize(cz));

  std::string out;
  for (const Segment& seg : split_schema(found->text)) {
    if (!seg.is_slot) {
      out += seg.text;
      continue;
    }
    std::string entity_text;
    if (seg.text == "addressee" && ctx.addressee) {
      entity_text = *ctx.addressee;
    } else if (seg.text == "speaker" && ctx.speaker) {
      entity_text = *ctx.speaker;
    } else if (auto v = binds.get(Sort::Entity, seg.text)) {
      entity_text = std::get<std::string>(*v);
    } else {
      raise(Errc::NoTemplate, "template slot {" + seg.text + "} has no value");
    }
    out += surface_word(entity_text);
  }
  return RealizeResult{out, found->id};
}

std::optional<RecognizeResult> TemplateTable::recognize(std::string_view text, Store& store,
                                                        const MatchContext& ctx) const {
  const std::string input = normalize_utterance(text);
  for (const Template& t : templates_) {
    auto segments = split_schema(t.text);
    std::size_t pos = 0;
    Bindings binds;
    bool ok = true;
    for (std::size_t i = 0; i < segments.size() && ok; ++i) {
      const Segment& seg = segments[i];
      if (!seg.is_slot) {
        if (input.compare(pos, seg.text.size(), seg.text) == 0) {
          pos += seg.text.size();
        } else {
          ok = false;
        }
        continue;
      }
      // Slot runs until the next literal (or end of input).
      std::size_t end;
      if (i + 1 < segments.size()) {
        end = input.find(segments[i + 1].text, pos);
        if (end == std::string::npos) {
          ok = false;
          continue;
        }
      } else {
        end = input.size();
      }
      std::string word = input.substr(pos, end - pos);
      if (word.empty()) {
        ok = false;
        continue;
      }
      std::string entity_text = entity_for_word(word).value_or(word);
      if (seg.text == "addressee") {
        ok = ctx.addressee && *ctx.addressee == entity_text;
      } else if (seg.text == "speaker") {
        ok = ctx.speaker && *ctx.speaker == entity_text;
      } else {
        ok = binds.bind(Sort::Entity, seg.text, entity_text);
      }
      pos = end;
    }
    if (!ok || pos != input.size()) continue;

    // Every pattern variable must be filled by some slot.
    std::vector<std::string> vars;
    collect_vars(t.pattern, vars);
    bool complete = std::all_of(vars.begin(), vars.end(), [&](const std::string& v) {
      return binds.get(Sort::Entity, v).has_value();
    });
    if (!complete) continue;

    try {
      CzId cz = materialize(t.pattern, binds, store, ctx);
      return RecognizeResult{cz, t.illoc, t.id};
    } catch (const Error&) {
      continue;  // context could not resolve (e.g. missing loc map)
    }
  }
  return std::nullopt;
}

}  // namespace cdplus
