#pragma once

// Random valid .cdx documents for round-trip testing. Generated as text with
// shuffled keyword order so the parser's normalization is exercised too.

#include <random>
#include <string>
#include <vector>

#include "cdplus/cdx.hpp"

namespace cdtest_gen {

inline const std::vector<std::string>& entity_pool() {
  static const std::vector<std::string> pool = {"Person",  "Robot", "Door",  "Table",
                                                "Tool(X)", "House", "Cat",   "PersonLoc",
                                                "Palm",    "Box(B)"};
  return pool;
}

inline const std::vector<std::string>& act_pool() {
  static const std::vector<std::string> pool = {"PTRANS", "MTRANS", "MBUILD", "CONCP", "WANT",
                                                "SAY",    "ANTICIPATE", "PUSH", "BE"};
  return pool;
}

inline const std::vector<std::string>& state_pool() {
  static const std::vector<std::string> pool = {"Open",        "Pleased",    "Displeased",
                                                "ANTICIPATION", "HOPE",       "FRUSTRATED",
                                                "FEAR",         "DISAPPOINTED", "RELIEVED"};
  return pool;
}

template <typename Rng>
const std::string& pick(Rng& rng, const std::vector<std::string>& pool) {
  std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
  return pool[d(rng)];
}

template <typename Rng>
int roll(Rng& rng, int n) {
  std::uniform_int_distribution<int> d(0, n - 1);
  return d(rng);
}

template <typename Rng>
std::string gen_mods(Rng& rng, bool allow_qwhy) {
  std::vector<std::string> mods;
  if (roll(rng, 3) == 0) mods.push_back("c");
  if (roll(rng, 3) == 0) mods.push_back(roll(rng, 2) ? "f" : "past");
  if (roll(rng, 4) == 0) mods.push_back("can");
  if (roll(rng, 4) == 0) mods.push_back("neg");
  if (allow_qwhy && roll(rng, 6) == 0) mods.push_back("qwhy");
  if (mods.empty()) return "";
  std::shuffle(mods.begin(), mods.end(), rng);
  std::string out = " :mods (";
  for (std::size_t i = 0; i < mods.size(); ++i) out += (i ? " " : "") + mods[i];
  return out + ")";
}

template <typename Rng>
std::string gen_cz_text(Rng& rng, int depth, std::vector<std::string>& labels, int& label_seq,
                        bool top_level) {
  const std::string& act = pick(rng, act_pool());
  std::vector<std::string> fields;
  fields.push_back(":actor " + pick(rng, entity_pool()));
  fields.push_back(":act " + act);

  const bool cz_object_only = act == "CONCP" || act == "ANTICIPATE";
  int obj_kind = roll(rng, 4);  // 0 none, 1 entity, 2 nested, 3 label ref
  if (cz_object_only && obj_kind == 1) obj_kind = depth < 2 ? 2 : 0;
  if (obj_kind == 3 && labels.empty()) obj_kind = 1;
  if (obj_kind == 2 && depth >= 2) obj_kind = 1;
  if (cz_object_only && obj_kind == 1) obj_kind = 0;
  if (obj_kind == 1) {
    fields.push_back(":obj " + pick(rng, entity_pool()));
  } else if (obj_kind == 2) {
    fields.push_back(":obj " + gen_cz_text(rng, depth + 1, labels, label_seq, false));
  } else if (obj_kind == 3) {
    fields.push_back(":obj #" + labels[roll(rng, static_cast<int>(labels.size()))]);
  }

  if (roll(rng, 3) == 0) fields.push_back(":from " + pick(rng, entity_pool()));
  if (roll(rng, 3) == 0) fields.push_back(":to " + pick(rng, entity_pool()));
  if (roll(rng, 5) == 0) fields.push_back(":inst " + pick(rng, entity_pool()));
  if (act == "BE" && roll(rng, 2) == 0) fields.push_back(":state " + pick(rng, state_pool()));

  std::string mods = gen_mods(rng, top_level);
  const bool has_qwhy = mods.find("qwhy") != std::string::npos;
  if (!mods.empty()) fields.push_back(mods.substr(1));  // strip the leading space

  // qwhy czs stay unlabeled so later refs cannot nest them
  if (top_level && !has_qwhy && roll(rng, 2) == 0) {
    std::string label = "L" + std::to_string(label_seq++);
    labels.push_back(label);
    fields.push_back(":label \"" + label + "\"");
  }

  std::shuffle(fields.begin(), fields.end(), rng);
  std::string out = "(cz";
  for (const std::string& f : fields) out += " " + f;
  return out + ")";
}

template <typename Rng>
cdplus::CdxDocument random_document(Rng& rng) {
  std::string text;
  std::vector<std::string> labels;
  int label_seq = 0;
  const int items = 1 + roll(rng, 8);
  for (int i = 0; i < items; ++i) {
    int kind = roll(rng, 10);
    if (kind < 6 || labels.size() < 2) {
      text += gen_cz_text(rng, 0, labels, label_seq, true) + "\n";
    } else if (kind < 7) {
      // links always run from an earlier label to a later one (keeps the
      // temporal relation acyclic by construction)
      int a = roll(rng, static_cast<int>(labels.size()) - 1);
      int b = a + 1 + roll(rng, static_cast<int>(labels.size()) - a - 1);
      if (roll(rng, 2) == 0) {
        text += "(causal :cause #" + labels[a] + " :effect #" + labels[b] + ")\n";
      } else {
        text += "(temporal :before #" + labels[a] + " :after #" + labels[b] + ")\n";
      }
    } else if (kind < 8) {
      text += "(state-attr :entity " + pick(rng, entity_pool()) + " :state " +
              pick(rng, state_pool()) + " :cz #" + labels[roll(rng, static_cast<int>(labels.size()))] +
              ")\n";
    } else if (kind < 9) {
      text += "(anchor " + (roll(rng, 2) ? pick(rng, act_pool()) : pick(rng, state_pool())) +
              " sa-" + std::to_string(roll(rng, 100)) + ")\n";
    } else {
      text += "(elab " + pick(rng, act_pool()) + " :script (#" +
              labels[roll(rng, static_cast<int>(labels.size()))] + "))\n";
    }
  }
  return cdplus::parse(text);
}

}  // namespace cdtest_gen
