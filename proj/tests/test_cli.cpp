#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "katzforge/io.hpp"
#include "support.hpp"

using namespace katzforge;
using namespace katzforge::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("katzforge_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    write_text_file(file(name), text);
    return file(name);
  }

 private:
  fs::path path_;
};

struct EnvGuard {
  explicit EnvGuard(const char* value) { ::setenv(cli::kToleranceEnv, value, 1); }
  ~EnvGuard() { ::unsetenv(cli::kToleranceEnv); }
};

}  // namespace

TEST_CASE("gen is deterministic") {
  TempDir dir;
  auto a = invoke({"gen", "--n", "8", "--density", "0.4", "--self-loops", "--seed", "5", "--out", dir.file("a.json")});
  auto b = invoke({"gen", "--n", "8", "--density", "0.4", "--self-loops", "--seed", "5", "--out", dir.file("b.json")});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(read_text_file(dir.file("a.json")) == read_text_file(dir.file("b.json")));
  CHECK(a.out.find("generated n=8") != std::string::npos);

  const auto doc = json::parse(read_text_file(dir.file("a.json")));
  CHECK(doc["meta"]["tool"] == "katzforge");
  CHECK(doc["meta"]["seed"] == 5);
  CHECK(doc["meta"]["generator"]["n"] == 8);
  const auto g = parse_instance(read_text_file(dir.file("a.json")));
  CHECK(g.topology().has_all_self_loops());
  CHECK(doc["meta"]["instance_hash"] == instance_hash(g));

  auto stdout_run = invoke({"gen", "--n", "3", "--seed", "1"});
  CHECK(stdout_run.code == 0);
  CHECK(parse_instance(stdout_run.out).size() == 3);
  CHECK(stdout_run.err.find("generated") != std::string::npos);
}

TEST_CASE("equilibrium") {
  TempDir dir;
  auto i1 = dir.write("i1.json", serialize_instance(instance_i1()));
  auto r = invoke({"equilibrium", "--instance", i1});
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["c_star"][0].get<double>() == doctest::Approx(1.0));
  CHECK(doc["contraction_rate"].get<double>() == 0.5);
  CHECK(doc["meta"]["tolerance"].get<double>() == 1e-10);

  auto i3 = dir.write("i3.json", serialize_instance(instance_i3()));
  r = invoke({"equilibrium", "--instance", i3, "--out", dir.file("eq.json")});
  REQUIRE(r.code == 0);
  doc = json::parse(read_text_file(dir.file("eq.json")));
  CHECK(doc["c_star"][1].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("run") {
  TempDir dir;
  auto i3 = dir.write("i3.json", serialize_instance(instance_i3()));

  SUBCASE("modified dynamics converge") {
    auto r = invoke({"run", "--instance", i3, "--mode", "modified", "--out", dir.file("t.csv")});
    CHECK(r.code == 0);
    auto summary = json::parse(read_text_file(dir.file("t.summary.json")));
    CHECK(summary["status"] == "converged");
    CHECK(summary["mode"] == "modified");
    CHECK(summary["centralities"][0].get<double>() == doctest::Approx(1.0));
    auto terminal = parse_allocation(read_text_file(dir.file("t.terminal.json")), 2);
    CHECK(terminal(1, 0) == 0.25);
    CHECK(read_text_file(dir.file("t.csv")).rfind("step,agent,residual,c_1,c_2\n", 0) == 0);
  }
  SUBCASE("step limit exits 2") {
    auto r = invoke({"run", "--instance", i3, "--scheduler", "rr", "--max-steps", "1", "--out", dir.file("t.csv")});
    CHECK(r.code == 2);
    CHECK(json::parse(read_text_file(dir.file("t.summary.json")))["status"] == "step-limit");
  }
  SUBCASE("same seed, same trace") {
    auto g = dir.write("g.json", serialize_instance(random_instance(11, 15)));
    for (const char* name : {"a.csv", "b.csv"}) {
      auto r = invoke({"run", "--instance", g, "--scheduler", "random", "--seed", "3", "--w0", "random", "--out",
                    dir.file(name)});
      CHECK(r.code == 0);
    }
    CHECK(read_text_file(dir.file("a.csv")) == read_text_file(dir.file("b.csv")));
  }
  SUBCASE("explicit schedule and full trace") {
    auto r = invoke({"run", "--instance", i3, "--scheduler", "seq:2,1,2", "--full-trace", "--out", dir.file("t.csv")});
    CHECK(r.code == 0);
    auto doc = json::parse(read_text_file(dir.file("t.allocations.json")));
    CHECK(doc["steps"][1]["agent"] == 2);
  }
  SUBCASE("initial profile from file") {
    auto w0 = dir.write("w0.json", serialize_allocation(profile({{0.5, 0.0}, {0.25, 0.0}})));
    auto r = invoke({"run", "--instance", i3, "--w0", "file:" + w0, "--out", dir.file("t.csv")});
    CHECK(r.code == 0);
    CHECK(json::parse(read_text_file(dir.file("t.summary.json")))["total_steps"] == 0);

    auto bad = dir.write("bad.json", serialize_allocation(profile({{0.9, 0.0}, {0.0, 0.0}})));
    CHECK(invoke({"run", "--instance", i3, "--w0", "file:" + bad, "--out", dir.file("u.csv")}).code == 3);
  }
  SUBCASE("batch over seeds") {
    auto r = invoke({"run", "--instance", i3, "--scheduler", "random", "--seeds", "1:4", "--jobs", "3", "--out",
                  dir.file("batch.csv")});
    CHECK(r.code == 0);
    for (int s = 1; s <= 4; ++s) CHECK(fs::exists(dir.file("batch.seed" + std::to_string(s) + ".csv")));
  }
  SUBCASE("usage errors exit 1") {
    CHECK(invoke({"run", "--instance", i3}).code == 1);
    CHECK(invoke({"run", "--instance", i3, "--mode", "sideways", "--out", dir.file("t.csv")}).code == 1);
    CHECK(invoke({"run", "--instance", dir.file("missing.json"), "--out", dir.file("t.csv")}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
  }
}

TEST_CASE("verify") {
  TempDir dir;
  auto i3 = dir.write("i3.json", serialize_instance(instance_i3()));
  auto eq = dir.write("eq.json", serialize_allocation(profile({{0.5, 0.0}, {0.25, 0.0}})));
  auto zero = dir.write("zero.json", serialize_allocation(AllocationProfile::zero(2)));
  auto over = dir.write("over.json", serialize_allocation(profile({{0.6, 0.0}, {0.0, 0.0}})));

  auto r = invoke({"verify", "--instance", i3, "--allocation", eq});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["verdict"] == true);

  r = invoke({"verify", "--instance", i3, "--allocation", zero});
  CHECK(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["verdict"] == false);
  CHECK(doc["residual"].get<double>() == doctest::Approx(0.5));

  r = invoke({"verify", "--instance", i3, "--allocation", over});
  CHECK(r.code == 3);
  CHECK(json::parse(r.out)["verdict"] == "infeasible");

  auto malformed = dir.write("m.json", "{\"weights\": [[0.5, 0.0], [0.25]]}");
  CHECK(invoke({"verify", "--instance", i3, "--allocation", malformed}).code == 1);
}

TEST_CASE("analyze") {
  TempDir dir;
  auto i3 = dir.write("i3.json", serialize_instance(instance_i3()));
  auto eq = dir.write("eq.json", serialize_allocation(profile({{0.5, 0.0}, {0.25, 0.0}})));
  auto r = invoke({"analyze", "--instance", i3, "--allocation", eq, "--dot", dir.file("g.dot")});
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["nash"] == true);
  bool saw_hierarchy = false;
  for (const auto& c : doc["checks"]) {
    CHECK(c["status"] != "fail");
    saw_hierarchy = saw_hierarchy || c["name"] == "hierarchy";
  }
  CHECK(saw_hierarchy);
  CHECK(doc["condensation"]["components"].size() == 2);
  CHECK(read_text_file(dir.file("g.dot")).find("digraph") != std::string::npos);
}

TEST_CASE("tolerance precedence") {
  CHECK(cli::resolve_tolerance(std::nullopt) == 1e-10);
  {
    EnvGuard env("1e-6");
    CHECK(cli::resolve_tolerance(std::nullopt) == 1e-6);
    CHECK(cli::resolve_tolerance(1e-4) == 1e-4);

    TempDir dir;
    auto i1 = dir.write("i1.json", serialize_instance(instance_i1()));
    auto doc = json::parse(invoke({"equilibrium", "--instance", i1}).out);
    CHECK(doc["meta"]["tolerance"].get<double>() == 1e-6);
    doc = json::parse(invoke({"equilibrium", "--instance", i1, "--tol", "1e-8"}).out);
    CHECK(doc["meta"]["tolerance"].get<double>() == 1e-8);
  }
  {
    EnvGuard env("nonsense");
    CHECK_THROWS_AS(cli::resolve_tolerance(std::nullopt), std::invalid_argument);
  }
}
