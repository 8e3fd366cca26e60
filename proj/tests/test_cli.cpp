#include "dimkit/cli.hpp"
#include "dimkit/gallery.hpp"
#include "dimkit/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dimkit;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  Json report() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("dimkit_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

 private:
  fs::path path_;
};

bool has_float(const Json& j) {
  if (j.is_number_float()) return true;
  if (j.is_structured())
    for (const auto& v : j) if (has_float(v)) return true;
  return false;
}

}  // namespace

TEST_CASE("dim on the 6-cycle") {
  TempDir dir;
  const auto c6 = dir.write("c6.json", R"({"gallery": "six_cycle"})");
  auto r = run({"dim", "--class", c6, "--kind", "ds"});
  CHECK(r.code == 0);
  CHECK(r.report()["result"]["dimension"] == 2);
  r = run({"dim", "--class", c6, "--kind", "natarajan"});
  CHECK(r.report()["result"]["dimension"] == 1);
  CHECK(r.report()["certificates"].size() == 1);
}

TEST_CASE("distinguisher command") {
  TempDir dir;
  auto r = run({"distinguisher", "--psi", dir.write("n.json", R"({"builtin": "psi_N", "labels": 3})")});
  CHECK(r.code == 0);
  CHECK(r.report()["result"]["is_distinguisher"] == true);
  r = run({"distinguisher", "--psi", dir.write("f.json", R"({"labels": 3, "family": [["1", "0", "0"]]})")});
  CHECK(r.code == 1);
  CHECK(r.report()["result"]["failing_pair"] == Json::array({1, 2}));
}

TEST_CASE("witness check on a full class fails with a shattered input") {
  TempDir dir;
  const auto full = dir.write("full.json", R"({"gallery": "full", "params": {"n": 2, "labels": 3}})");
  const auto r = run({"witness", "check", "--class", full, "--flavor", "natarajan", "--order", "1"});
  CHECK(r.code == 1);
  const auto v = r.report()["result"]["validation"];
  CHECK(v["valid"] == false);
  CHECK(v["violations"][0]["message"].get<std::string>().find("shattered") != std::string::npos);
}

TEST_CASE("witness make emits a tabulated witness that checks") {
  TempDir dir;
  const auto cls = dir.write("three.json", R"({"labels": 3, "domain": 2, "hypotheses": [[0,1],[1,0],[2,2]]})");
  auto r = run({"witness", "make", "--class", cls, "--flavor", "natarajan", "--order", "1"});
  REQUIRE(r.code == 0);
  const auto w = dir.write("w.json", r.report()["result"]["witness"].dump());
  r = run({"witness", "check", "--class", cls, "--witness", w});
  CHECK(r.code == 0);
  CHECK(r.report()["result"]["provenance"] == "user");
}

TEST_CASE("schema errors exit 2") {
  TempDir dir;
  auto r = run({"dim", "--class", dir.write("bad.json", R"({"labels": 3, "domain": 2, "hypotheses": [[0,1,2]]})"),
                "--kind", "ds"});
  CHECK(r.code == 2);
  CHECK(r.report()["error"]["code"] == "SCHEMA");
  r = run({"dim", "--class", dir.write("lbl.json", R"({"labels": 2, "domain": 1, "hypotheses": [[5]]})"), "--kind",
           "ds"});
  CHECK(r.code == 2);
  r = run({"dim", "--class", dir.write("syntax.json", "{"), "--kind", "ds"});
  CHECK(r.code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("duplicate hypotheses are dropped with a warning") {
  TempDir dir;
  const auto r = run({"dim", "--class",
                      dir.write("dup.json", R"({"labels": 2, "domain": 1, "hypotheses": [[0],[1],[0]]})"), "--kind",
                      "vc"});
  CHECK(r.code == 0);
  CHECK(r.report()["warnings"].size() == 1);
}

TEST_CASE("gallery emit round-trips through the class parser") {
  for (const auto& name : gallery_names()) {
    const auto r = run({"gallery", "emit", name});
    REQUIRE(r.code == 0);
    const Json doc = r.report()["result"]["class"];
    const auto parsed = parse_class_json(doc);
    CHECK(class_to_json(parsed.cls) == doc);
    const auto direct = gallery_lookup(name, {});
    CHECK(parsed.cls.hypotheses() == direct.cls.hypotheses());
  }
}

TEST_CASE("reports are byte-stable across runs and thread counts and never contain floats") {
  TempDir dir;
  const auto c6 = dir.write("c6.json", R"({"gallery": "six_cycle"})");
  const auto gap = dir.write("gap.json", R"({"gallery": "gap", "params": {"m": 3}})");
  const auto wgap = dir.write("wgap.json", R"({"gallery": "gap", "params": {"m": 3}})");
  const std::vector<std::vector<std::string>> commands{
      {"dim", "--class", c6, "--kind", "graph"},
      {"witness", "check", "--class", gap, "--witness", wgap},
      {"nfl", "--learner", "memorize:1", "--points", "0,1,2,3", "--g1", "0,0,0,0", "--g2", "1,1,1,1"},
      {"sauer", "--class", c6, "--points", "0,1", "--d", "1"},
      {"min-kb", "--kn", "1", "--q", "3"}};
  for (const auto& cmd : commands) {
    auto one = cmd, many = cmd;
    one.insert(one.begin(), {"--threads", "1"});
    many.insert(many.begin(), {"--threads", "3"});
    const auto a = run(one), b = run(many), c = run(one);
    CAPTURE(cmd[0]);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(!has_float(a.report()));
  }
}

TEST_CASE("nfl and learner witnesses from the command line") {
  TempDir dir;
  auto r = run({"nfl", "--learner", "const:1", "--points", "0,1", "--g1", "1,1", "--g2", "2,2"});
  REQUIRE(r.code == 0);
  const auto res = r.report()["result"];
  CHECK(res["f"]["values"] == Json::array({2, 2}));
  CHECK(res["expected_risk"] == Json{{"num", 1}, {"den", 1}});
  const auto one = dir.write("one.json", R"({"labels": 3, "domain": 2, "hypotheses": [[1,1]]})");
  r = run({"witness", "from-learner", "--learner", "erm:" + one, "--m", "1", "--class", one, "--points", "0,1",
           "--g1", "1,1", "--g2", "2,2"});
  CHECK(r.code == 0);
  CHECK(r.report()["result"]["learns"] == true);
  CHECK(r.report()["result"]["I"] != Json::array({0, 1}));
}

TEST_CASE("embed commands") {
  TempDir dir;
  const auto cls = dir.write("nat.json", R"({"gallery": "three_pattern_nat"})");
  const auto w = dir.write("w.json", R"({"canonical": {"flavor": "natarajan", "order": 1}})");
  auto r = run({"embed", "behaviors", "--class", cls, "--witness", w, "--points", "0,1"});
  CHECK(r.code == 0);
  CHECK(r.report()["result"]["base_contained"] == true);
  r = run({"embed", "erm", "--class", cls, "--witness", w, "--sample", "0:2,1:2"});
  CHECK(r.code == 0);
  CHECK(r.report()["result"]["risk"]["num"] == 0);
  r = run({"embed", "learn", "--class", cls, "--witness", w, "--sample", "0:2,1:2", "--eval", "0,1,7"});
  CHECK(r.report()["result"]["predictions"] == Json::array({2, 2, 0}));
}

TEST_CASE("refute-ds on the 6-cycle") {
  TempDir dir;
  const auto r = run({"--threads", "2", "refute-ds", "--class", dir.write("c6.json", R"({"gallery": "six_cycle"})")});
  CHECK(r.code == 0);
  CHECK(r.report()["result"]["verdict"] == "refuted");
  CHECK(r.report()["result"]["pairs_examined"] == 531441);
}

TEST_CASE("timing is opt-in") {
  CHECK(!run({"min-kb", "--kn", "0", "--q", "2"}).report().contains("runtime_ms"));
  CHECK(run({"--timing", "min-kb", "--kn", "0", "--q", "2"}).report().contains("runtime_ms"));
}

TEST_CASE("sample parsing") {
  CHECK(parse_sample("0:1,3:2") == LabeledSample{{0, 1}, {3, 2}});
  CHECK_THROWS_AS(parse_sample("0:1,x"), Error);
  TempDir dir;
  CHECK(parse_sample(dir.write("s.json", "[[1, 2], [1, 0]]")) == LabeledSample{{1, 2}, {1, 0}});
}
