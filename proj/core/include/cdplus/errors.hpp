#pragma once

#include <stdexcept>
#include <string>

namespace cdplus {

enum class Errc {
  DanglingRef,
  LabelClash,
  BadObject,
  SelfCause,
  TemporalCycle,
  ElaborationCycle,
  SyntaxError,
  UnknownAct,
  UnknownState,
  DanglingLabelRef,
  SortMismatch,
  UnboundVariable,
  DuplicateRuleName,
  UnboundEffectVariable,
  NoTemplate,
  AmbiguousTemplate,
  Unrecognized,
  NoModel,
  MalformedGoal,
  PreconditionViolated,
  ScenarioInvalid,
  NoProvenance,
  Ungrounded,  // diagnostic-only: symbol lacks both anchor and elaboration
};

const char* errc_name(Errc) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

// Parse-time failure; always carries a 1-based source position.
class ParseError : public Error {
public:
  ParseError(Errc code, const std::string& message, int line, int col);
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

private:
  int line_;
  int col_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

}  // namespace cdplus
