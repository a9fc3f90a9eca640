#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

using nlohmann::json;
namespace fs = std::filesystem;

#ifndef ROTORSIM_CLI_PATH
#error "ROTORSIM_CLI_PATH must point at the rotorsim binary"
#endif

namespace {

struct CliResult {
  int code = -1;
  std::string output;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "rotorsim-test-cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path capture = work_dir() / ("capture-" + std::to_string(counter++) + ".txt");
  const std::string cmd =
      std::string(ROTORSIM_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::stringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  return result;
}

fs::path write_scenario(const std::string& name, const json& doc) {
  const fs::path p = work_dir() / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

json quick_readout() {
  return json{{"kind", "readout"},
              {"atom", {{"bright_mean", 20.0}, {"dark_mean", 0.0}, {"threshold", 1}}},
              {"protocol", {{"repetitions", 3}, {"classification_error", 0.1}}},
              {"trials", 300}};
}

}  // namespace

TEST_CASE("preset listing and validation") {
  const CliResult list = run_cli("presets");
  CHECK(list.code == 0);
  CHECK(list.output.find("ns2-rabi") != std::string::npos);
  CHECK(list.output.find("ns2-readout") != std::string::npos);

  const CliResult listed = run_cli("presets --json");
  CHECK(listed.code == 0);
  const json catalog = json::parse(listed.output);
  CHECK(catalog.is_array());
  CHECK(catalog.size() >= 10);

  const CliResult ok = run_cli("validate ns2-readout");
  CHECK(ok.code == 0);
  CHECK(ok.output.find("ok: readout") != std::string::npos);
}

TEST_CASE("argument errors exit with the config code") {
  CHECK(run_cli("run").code == 2);                    // missing target
  CHECK(run_cli("frobnicate").code == 2);             // unknown subcommand
  CHECK(run_cli("run ns2-readout --format xml").code == 2);
  CHECK(run_cli("validate no-such-preset").code == 2);
  CHECK(run_cli("--version").code == 0);

  const fs::path bad = work_dir() / "bad.json";
  std::ofstream(bad) << "{ definitely not json";
  const CliResult r = run_cli("validate " + bad.string());
  CHECK(r.code == 2);
  CHECK(r.output.find("config error:") != std::string::npos);
}

TEST_CASE("run writes a result document next to its tables") {
  const fs::path scenario = write_scenario("quick.json", quick_readout());
  const fs::path out = work_dir() / "results";
  const CliResult r = run_cli("run " + scenario.string() + " --seed 3 --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.output.find("readout") != std::string::npos);
  CHECK(r.output.find("wrote ") != std::string::npos);

  const fs::path doc_path = out / "readout.json";
  REQUIRE(fs::exists(doc_path));
  std::ifstream in(doc_path);
  const json doc = json::parse(in);
  CHECK(doc["provenance"]["seed"] == 3);
  CHECK(doc["results"]["trials_per_input"] == 300);
  CHECK(fs::exists(out / "readout_rounds.csv"));
}

TEST_CASE("no-write mode prints results without touching the disk") {
  const fs::path scenario = write_scenario("quick2.json", quick_readout());
  const fs::path out = work_dir() / "never-created";
  const CliResult r = run_cli("run " + scenario.string() + " --no-write --out " +
                              out.string() + " --json");
  CHECK(r.code == 0);
  CHECK(!fs::exists(out));
  const json doc = json::parse(r.output);
  CHECK(doc["kind"] == "readout");
  CHECK(doc["results"].contains("fidelity"));
}

TEST_CASE("sweep subcommand insists on sweep scenarios") {
  const fs::path scenario = write_scenario("quick3.json", quick_readout());
  const CliResult r = run_cli("sweep " + scenario.string() + " --no-write");
  CHECK(r.code == 2);
  CHECK(r.output.find("not a sweep scenario") != std::string::npos);
}

TEST_CASE("simulation failures exit with the simulation code") {
  json doc{{"kind", "rabi"},
           {"rabi",
            {{"to", {2, 0}},
             {"j_max", 2},
             {"m_restriction", "zero"},
             {"duration_s", 1.0e-9},
             {"samples", 8},
             {"tolerance", 1.0e-30}}}};  // unattainable: refinement gives up
  const fs::path scenario = write_scenario("diverge.json", doc);
  const CliResult r = run_cli("run " + scenario.string() + " --no-write");
  CHECK(r.code == 3);
  CHECK(r.output.find("simulation error:") != std::string::npos);
}

TEST_CASE("unwritable output paths exit with the io code") {
  const fs::path scenario = write_scenario("quick4.json", quick_readout());
  const CliResult r = run_cli("run " + scenario.string() + " --out /dev/null/sub");
  CHECK(r.code == 4);
  CHECK(r.output.find("io error:") != std::string::npos);
}
