// cdsim: run scenarios, validate cdx files, explain trace events, poke at
// agents in a small repl.

#include <unistd.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cdplus/dialogue.hpp"

namespace {

bool use_color() {
  if (std::getenv("CDPLUS_NO_COLOR") || std::getenv("NO_COLOR")) return false;
  return isatty(fileno(stdout));
}

std::string bold(const std::string& s) { return use_color() ? "\033[1m" + s + "\033[0m" : s; }

int write_or_print(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return 2;
  }
  out << content;
  return 0;
}

cdplus::Simulation make_sim(const std::string& scenario_path) {
  auto doc = cdplus::load_cdx_file(scenario_path);
  return cdplus::Simulation(cdplus::Scenario::load(doc), cdplus::load_builtin_rulebase(),
                            cdplus::load_builtin_templates());
}

int cmd_run(const std::string& scenario_path, const std::string& trace_path,
            const std::string& golden_path) {
  try {
    cdplus::Simulation sim = make_sim(scenario_path);
    sim.run();
    std::string serialized = sim.trace().serialize();
    if (int rc = write_or_print(serialized, trace_path); rc != 0) return rc;
    if (!golden_path.empty()) {
      std::string golden = cdplus::read_file(golden_path);
      if (golden != serialized) {
        std::cerr << "trace differs from golden " << golden_path << "\n";
        return 1;
      }
    }
    return 0;
  } catch (const cdplus::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

int cmd_validate(const std::string& path) {
  try {
    auto diags = cdplus::validate(cdplus::read_file(path));
    for (const auto& d : diags) {
      std::cout << path << ":" << d.pos.line << ":" << d.pos.col << ": "
                << cdplus::errc_name(d.code) << ": " << d.message << "\n";
    }
    return diags.empty() ? 0 : 1;
  } catch (const cdplus::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

int cmd_explain(const std::string& trace_path, uint64_t event_id) {
  try {
    cdplus::Trace trace = cdplus::Trace::parse(cdplus::read_file(trace_path));
    if (!trace.find(event_id)) {
      std::cerr << "unknown event e" << event_id << "\n";
      return 2;
    }
    try {
      cdplus::CausalChain chain = cdplus::why(trace, event_id);
      std::cout << bold("why e" + std::to_string(event_id)) << "\n";
      for (const std::string& line : render_chain(trace, chain)) std::cout << line << "\n";
      return 0;
    } catch (const cdplus::Error& e) {
      if (e.code() == cdplus::Errc::NoProvenance) {
        std::cout << e.what() << "\n";
        return 1;
      }
      throw;
    }
  } catch (const cdplus::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

int cmd_repl(const std::string& scenario_path) {
  try {
    cdplus::Simulation sim = make_sim(scenario_path);
    std::string line;
    while (std::getline(std::cin, line)) {
      std::istringstream ss(line);
      std::string cmd;
      ss >> cmd;
      if (cmd.empty()) continue;
      if (cmd == "quit" || cmd == "exit") break;
      if (cmd == "help") {
        std::cout << "commands: step | run | state <agent> | inject <agent> (cz ...) | trace | quit\n";
      } else if (cmd == "step") {
        if (sim.step_once())
          std::cout << "tick " << sim.tick() << "\n";
        else
          std::cout << "finished\n";
      } else if (cmd == "run") {
        sim.run();
        std::cout << "finished at tick " << sim.tick() << "\n";
      } else if (cmd == "state") {
        std::string name;
        ss >> name;
        try {
          std::cout << sim.agent(name).dump(sim.shared());
        } catch (const cdplus::Error&) {
          std::cout << "unknown agent " << name << "\n";
        }
      } else if (cmd == "inject") {
        std::string name;
        ss >> name;
        std::string rest;
        std::getline(ss, rest);
        try {
          sim.agent(name);
          sim.inject(name, rest);
          std::cout << "queued for " << name << "\n";
        } catch (const cdplus::Error& e) {
          std::cout << e.what() << "\n";
        }
      } else if (cmd == "trace") {
        std::cout << sim.trace().serialize();
      } else {
        std::cout << "unknown command " << cmd << " (try help)\n";
      }
    }
    return 0;
  } catch (const cdplus::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CD+ dialogue simulator"};
  app.require_subcommand(1);

  std::string scenario_path, trace_path, golden_path, validate_path, explain_trace;
  uint64_t event_id = 0;

  CLI::App* run = app.add_subcommand("run", "run a scenario and emit its trace");
  run->add_option("scenario", scenario_path, "scenario .cdx file")->required();
  run->add_option("--trace", trace_path, "write the trace here instead of stdout");
  run->add_option("--golden", golden_path, "compare the trace byte-for-byte against this file");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a .cdx file");
  validate->add_option("file", validate_path, ".cdx file")->required();

  CLI::App* explain = app.add_subcommand("explain", "print the causal chain behind a trace event");
  explain->add_option("trace", explain_trace, "trace file from `run`")->required();
  explain->add_option("event", event_id, "event id (the e field)")->required();

  CLI::App* repl = app.add_subcommand("repl", "interactive debug session over a scenario");
  repl->add_option("scenario", scenario_path, "scenario .cdx file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(scenario_path, trace_path, golden_path);
  if (validate->parsed()) return cmd_validate(validate_path);
  if (explain->parsed()) return cmd_explain(explain_trace, event_id);
  if (repl->parsed()) return cmd_repl(scenario_path);
  return 2;
}
