#include "cdplus/trace.hpp"

#include <json.hpp>

#include "cdplus/errors.hpp"

namespace cdplus {

using ordered_json = nlohmann::ordered_json;

EventId Trace::append(int tick, std::string agent, std::string kind,
                      std::vector<std::pair<std::string, std::string>> data,
                      std::vector<EventId> prov) {
  TraceEvent ev;
  ev.id = events_.size() + 1;
  ev.tick = tick;
  ev.agent = std::move(agent);
  ev.kind = std::move(kind);
  ev.data = std::move(data);
  for (EventId p : prov)
    if (p != 0 && p < ev.id) ev.prov.push_back(p);
  events_.push_back(std::move(ev));
  return events_.back().id;
}

const TraceEvent* Trace::find(EventId id) const {
  if (id == 0 || id > events_.size()) return nullptr;
  return &events_[id - 1];
}

void Trace::remember_fact(const std::string& fact, EventId id) { facts_[fact] = id; }

std::optional<EventId> Trace::fact_source(const std::string& fact) const {
  auto it = facts_.find(fact);
  if (it == facts_.end()) return std::nullopt;
  return it->second;
}

std::string Trace::serialize() const {
  std::string out;
  for (const TraceEvent& ev : events_) {
    ordered_json j;
    j["e"] = ev.id;
    j["tick"] = ev.tick;
    j["agent"] = ev.agent;
    j["kind"] = ev.kind;
    ordered_json data = ordered_json::object();
    for (const auto& [k, v] : ev.data) data[k] = v;
    j["data"] = std::move(data);
    j["prov"] = ev.prov;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Trace Trace::parse(std::string_view text) {
  Trace trace;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ParseError(Errc::SyntaxError, "bad trace line", line_no, 1);
    TraceEvent ev;
    ev.id = j.at("e").get<EventId>();
    ev.tick = j.at("tick").get<int>();
    ev.agent = j.at("agent").get<std::string>();
    ev.kind = j.at("kind").get<std::string>();
    for (auto it = j.at("data").begin(); it != j.at("data").end(); ++it)
      ev.data.emplace_back(it.key(), it.value().get<std::string>());
    for (const auto& p : j.at("prov")) ev.prov.push_back(p.get<EventId>());
    trace.events_.push_back(std::move(ev));
  }
  return trace;
}

std::vector<const TraceEvent*> Trace::select(std::string_view kind,
                                             std::string_view agent) const {
  std::vector<const TraceEvent*> out;
  for (const TraceEvent& ev : events_)
    if (ev.kind == kind && (agent.empty() || ev.agent == agent)) out.push_back(&ev);
  return out;
}

const std::string* event_field(const TraceEvent& ev, std::string_view key) {
  for (const auto& [k, v] : ev.data)
    if (k == key) return &v;
  return nullptr;
}

}  // namespace cdplus
