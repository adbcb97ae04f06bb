#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "test_support.hpp"

namespace {

const std::string kRoot = CDPLUS_TEST_DATA_ROOT;
const std::string kBin = CDPLUS_CDSIM_PATH;

int run_cmd(const std::string& args, const std::string& stdout_file = "",
            const std::string& stdin_text = "") {
  std::string cmd = "CDPLUS_DATA_ROOT=" + kRoot + " CDPLUS_NO_COLOR=1 ";
  if (!stdin_text.empty()) {
    std::ofstream in("cli_stdin.txt");
    in << stdin_text;
    in.close();
    cmd += kBin + " " + args + " < cli_stdin.txt";
  } else {
    cmd += kBin + " " + args;
  }
  if (!stdout_file.empty()) cmd += " > " + stdout_file + " 2>/dev/null";
  else cmd += " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run writes a trace containing the handover line") {
  int rc = run_cmd("run " + kRoot + "/scenarios/success.cdx --trace cli_success.trace");
  CHECK(rc == 0);
  CHECK(slurp("cli_success.trace").find("Here is Tool(X).") != std::string::npos);
}

TEST_CASE("run against matching goldens exits 0, against wrong goldens exits 1") {
  CHECK(run_cmd("run " + kRoot + "/scenarios/failure.cdx --trace cli_failure.trace --golden " +
                cdtest::golden_path("failure.trace")) == 0);
  CHECK(run_cmd("run " + kRoot + "/scenarios/failure.cdx --trace cli_failure2.trace --golden " +
                cdtest::golden_path("success.trace")) == 1);
}

TEST_CASE("run on unreadable or invalid scenarios exits 2") {
  CHECK(run_cmd("run " + kRoot + "/scenarios/does-not-exist.cdx") == 2);
  CHECK(run_cmd("run " + kRoot + "/rules/builtin.cdx") == 2);  // no scenario section
}

TEST_CASE("two consecutive runs are byte-identical") {
  CHECK(run_cmd("run " + kRoot + "/scenarios/success.cdx --trace cli_det_a.trace") == 0);
  CHECK(run_cmd("run " + kRoot + "/scenarios/success.cdx --trace cli_det_b.trace") == 0);
  CHECK(slurp("cli_det_a.trace") == slurp("cli_det_b.trace"));
}

TEST_CASE("validate exit codes: clean, diagnostics, parse failure") {
  CHECK(run_cmd("validate " + kRoot + "/scenarios/success.cdx") == 0);
  CHECK(run_cmd("validate " + kRoot + "/knowledge/base.cdx") == 0);

  std::ofstream bad_act("cli_bad_act.cdx");
  bad_act << "(cz :actor Person :act FLY)\n";
  bad_act.close();
  CHECK(run_cmd("validate cli_bad_act.cdx") == 2);

  std::ofstream ungrounded("cli_ungrounded.cdx");
  ungrounded << "(anchor BE sa-be)\n(cz :actor Door :act BE :state Open)\n";
  ungrounded.close();
  CHECK(run_cmd("validate cli_ungrounded.cdx") == 1);

  std::ofstream empty("cli_empty.cdx");
  empty.close();
  CHECK(run_cmd("validate cli_empty.cdx") == 0);
}

TEST_CASE("explain prints the chain down to the motivation") {
  REQUIRE(run_cmd("run " + kRoot + "/scenarios/failure.cdx --trace cli_explain.trace") == 0);
  CHECK(run_cmd("explain cli_explain.trace 7", "cli_explain_out.txt") == 0);
  std::string out = slurp("cli_explain_out.txt");
  CHECK(out.find("mconc-update") != std::string::npos);
  CHECK(out.find("mconc=m1") != std::string::npos);
  CHECK(out.find("source=intrinsic") != std::string::npos);

  // the because-answer explanation includes the unsatisfied precondition
  CHECK(run_cmd("explain cli_explain.trace 37", "cli_explain_because.txt") == 0);
  CHECK(slurp("cli_explain_because.txt").find("(cz :actor Tool(X) :act BE :to Table)") !=
        std::string::npos);

  CHECK(run_cmd("explain cli_explain.trace 9999") == 2);
  CHECK(run_cmd("explain cli_explain.trace 1") == 1);  // no provenance
}

TEST_CASE("repl: piped steps match the batch run prefix") {
  REQUIRE(run_cmd("run " + kRoot + "/scenarios/success.cdx --trace cli_batch.trace") == 0);
  CHECK(run_cmd("repl " + kRoot + "/scenarios/success.cdx", "cli_repl_out.txt",
                "step\nstep\ntrace\nquit\n") == 0);
  std::string out = slurp("cli_repl_out.txt");
  std::string batch = slurp("cli_batch.trace");

  // everything the repl traced in two ticks is a prefix of the batch trace
  auto first = out.find("{\"e\":1,");
  REQUIRE(first != std::string::npos);
  std::string repl_trace = out.substr(first);
  CHECK(batch.substr(0, repl_trace.size()) == repl_trace);
}

TEST_CASE("repl: state shows the robot's frustration after the failure") {
  CHECK(run_cmd("repl " + kRoot + "/scenarios/failure.cdx", "cli_repl_state.txt",
                "run\nstate Robot\nquit\n") == 0);
  std::string out = slurp("cli_repl_state.txt");
  CHECK(out.find("FRUSTRATED") != std::string::npos);
  CHECK(out.find("RELIEVED") != std::string::npos);
  CHECK(out.find("mconc m1 failed adopted(Person)") != std::string::npos);
}

TEST_CASE("repl: unknown commands keep the session alive, empty script exits cleanly") {
  CHECK(run_cmd("repl " + kRoot + "/scenarios/success.cdx", "cli_repl_unknown.txt",
                "bogus\nstep\nquit\n") == 0);
  std::string out = slurp("cli_repl_unknown.txt");
  CHECK(out.find("unknown command bogus") != std::string::npos);
  CHECK(out.find("tick 1") != std::string::npos);

  CHECK(run_cmd("repl " + kRoot + "/scenarios/success.cdx", "cli_repl_empty.txt", "\n") == 0);
}

TEST_CASE("repl: inject feeds a scripted message into the next turn") {
  CHECK(run_cmd("repl " + kRoot + "/scenarios/success.cdx", "cli_repl_inject.txt",
                "inject Robot (cz :actor Cat :act BE :to Table)\nrun\ntrace\nquit\n") == 0);
  std::string out = slurp("cli_repl_inject.txt");
  CHECK(out.find("queued for Robot") != std::string::npos);
  CHECK(out.find("Here is Tool(X).") != std::string::npos);
}
