#include "cdplus/errors.hpp"

namespace cdplus {

const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::DanglingRef: return "DanglingRef";
    case Errc::LabelClash: return "LabelClash";
    case Errc::BadObject: return "BadObject";
    case Errc::SelfCause: return "SelfCause";
    case Errc::TemporalCycle: return "TemporalCycle";
    case Errc::ElaborationCycle: return "ElaborationCycle";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownAct: return "UnknownAct";
    case Errc::UnknownState: return "UnknownState";
    case Errc::DanglingLabelRef: return "DanglingLabelRef";
    case Errc::SortMismatch: return "SortMismatch";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::DuplicateRuleName: return "DuplicateRuleName";
    case Errc::UnboundEffectVariable: return "UnboundEffectVariable";
    case Errc::NoTemplate: return "NoTemplate";
    case Errc::AmbiguousTemplate: return "AmbiguousTemplate";
    case Errc::Unrecognized: return "Unrecognized";
    case Errc::NoModel: return "NoModel";
    case Errc::MalformedGoal: return "MalformedGoal";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
    case Errc::NoProvenance: return "NoProvenance";
    case Errc::Ungrounded: return "Ungrounded";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

ParseError::ParseError(Errc code, const std::string& message, int line, int col)
    : Error(code, message + " at " + std::to_string(line) + ":" + std::to_string(col)),
      line_(line),
      col_(col) {}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace cdplus
