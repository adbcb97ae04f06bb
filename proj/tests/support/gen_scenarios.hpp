#pragma once

// Scenario variants for randomized invariant checks: tool placement and
// attitudes vary, the cast stays fixed.

#include <string>

namespace cdtest_gen {

inline std::string scenario_variant(const std::string& tool_loc,
                                    const std::string& robot_toward_person,
                                    const std::string& person_toward_robot) {
  std::string text;
  for (const char* sym :
       {"PTRANS", "MTRANS", "MBUILD", "CONCP", "WANT", "SAY", "ANTICIPATE", "BE"})
    text += "(anchor " + std::string(sym) + " sa-x)\n";
  for (const char* sym : {"Open", "Pleased", "Displeased", "ANTICIPATION", "HOPE", "FRUSTRATED",
                          "FEAR", "DISAPPOINTED", "RELIEVED"})
    text += "(anchor " + std::string(sym) + " sa-x)\n";
  text +=
      "(cz :label \"1\" :actor Person :act WANT"
      " :obj (cz :actor Robot :act PTRANS :obj Tool(X) :from Table :to Person))\n"
      "(scenario :name variant :turn-order (Person Robot) :max-ticks 20)\n"
      "(world :locations (Table PersonLoc RobotLoc Elsewhere)"
      " :at ((Person PersonLoc) (Robot RobotLoc) (Tool(X) " +
      tool_loc +
      ")))\n"
      "(agent :name Person :capabilities ((can-ptrans false)) :attitudes ((Robot " +
      person_toward_robot +
      ")) :wants (#1) :models (Robot))\n"
      "(agent :name Robot :capabilities ((can-ptrans true)) :attitudes ((Person " +
      robot_toward_person +
      ")) :knowledge ((why-answer-pleases Person)) :models (Person))\n";
  return text;
}

inline const char* kVariantLocations[] = {"Table", "PersonLoc", "RobotLoc", "Elsewhere"};
inline const char* kVariantAttitudes[] = {"SERVILE", "ALTRUISTIC", "COOPERATIVE", "REBELLIOUS",
                                          "UNCOOPERATIVE"};

}  // namespace cdtest_gen
