#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdplus {

using EventId = uint64_t;

// One simulation event. Serialized as one JSON object per line with stable
// field order; ids are sequential from 1, provenance ids always precede the
// event that carries them.
struct TraceEvent {
  EventId id = 0;
  int tick = 0;
  std::string agent;
  std::string kind;  // utterance | affect-onset | affect-offset | rule-firing |
                     // plan-result | world-event | prediction | prosp-update |
                     // mconc-update
  std::vector<std::pair<std::string, std::string>> data;
  std::vector<EventId> prov;
};

class Trace {
public:
  EventId append(int tick, std::string agent, std::string kind,
                 std::vector<std::pair<std::string, std::string>> data,
                 std::vector<EventId> prov);

  const TraceEvent* find(EventId) const;
  std::span<const TraceEvent> events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  // world-fact bookkeeping so percept-driven updates can cite the world
  // event that made them true
  void remember_fact(const std::string& canonical_fact, EventId);
  std::optional<EventId> fact_source(const std::string& canonical_fact) const;

  std::string serialize() const;
  static Trace parse(std::string_view text);

  // Events of one kind, optionally filtered by agent, in order.
  std::vector<const TraceEvent*> select(std::string_view kind,
                                        std::string_view agent = {}) const;

private:
  std::vector<TraceEvent> events_;
  std::map<std::string, EventId> facts_;
};

const std::string* event_field(const TraceEvent&, std::string_view key);

}  // namespace cdplus
