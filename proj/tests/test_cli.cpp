#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lyk/cli.hpp"
#include "lyk/errors.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "lyk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = lyk::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_starting(const std::string& text, const std::string& prefix) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) out.push_back(line);
  return out;
}

std::string field(const std::string& line, const std::string& key) {
  const auto at = line.find(" " + key + "=");
  REQUIRE(at != std::string::npos);
  const auto from = at + key.size() + 2;
  if (line[from] == '"') return line.substr(from + 1, line.find('"', from + 1) - from - 1);
  return line.substr(from, line.find(' ', from) - from);
}

std::string temp_path(const char* name) { return std::string(P_tmpdir) + "/lyk_test_" + name; }

}  // namespace

TEST_CASE("cutting-times emits the Fibonacci numbers") {
  auto r = run({"cutting-times", "--q", "fib", "--depth", "10"});
  REQUIRE(r.code == 0);
  auto rows = lines_starting(r.out, "S ");
  REQUIRE(rows.size() == 11);
  long a = 1, b = 2;
  for (const auto& row : rows) {
    CHECK(std::stol(field(row, "S")) == a);
    const long c = a + b;
    a = b;
    b = c;
  }
  auto summary = lines_starting(r.out, "summary");
  REQUIRE(summary.size() == 1);
  CHECK(field(summary[0], "config.depth") == "10");
}

TEST_CASE("pisot reports the cyclotomic factor for d = 5") {
  auto r = run({"pisot", "--d", "5"});
  REQUIRE(r.code == 0);
  auto factors = lines_starting(r.out, "factor");
  REQUIRE(factors.size() == 2);
  CHECK(field(factors[0], "poly") == "x^2 - x + 1");
  CHECK(field(factors[1], "poly") == "x^3 - x - 1");
  auto s = lines_starting(r.out, "summary")[0];
  CHECK(field(s, "unit_modulus_roots") == "2");
  CHECK(field(s, "pisot") == "no");

  auto two = run({"pisot", "--d", "2", "--k-max", "60"});
  REQUIRE(two.code == 0);
  CHECK(field(lines_starting(two.out, "summary")[0], "decay_verdict") == "summable-looking");
}

TEST_CASE("classify-pairs is byte-identical across runs and thread counts") {
  const std::vector<std::string> base{"classify-pairs", "--map", "logistic a=4", "--pairs", "200", "--seed", "7",
                                      "--window", "5000"};
  auto a = run(base);
  auto b = run(base);
  auto with_threads = base;
  with_threads.insert(with_threads.begin(), {"--threads", "3"});
  auto c = run(with_threads);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(lines_starting(a.out, "pair ").size() == 200);
}

TEST_CASE("input errors exit with 2 and name the parameter") {
  auto unknown = run({"cutting-times", "--bogus", "1"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("--bogus") != std::string::npos);

  auto bad = run({"cutting-times", "--depth", "ten"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("--depth") != std::string::npos);

  auto map = run({"classify-pairs", "--map", "logistic a:5"});
  CHECK(map.code == 2);
  CHECK(map.err.find("--map") != std::string::npos);

  auto rule = run({"loops", "--q", "nonsense"});
  CHECK(rule.code == 2);
  CHECK(rule.err.find("--q") != std::string::npos);

  auto interval = run({"limsup-full", "--map", "logistic a:4", "--a", "0.5:1.5"});
  CHECK(interval.code == 2);
  CHECK(interval.err.find("--a") != std::string::npos);

  CHECK(run({}).code == 2);

  const std::string cfg = temp_path("unknown.cfg");
  std::ofstream(cfg) << "q = fib\nwindow = 3\n";
  auto file = run({"cutting-times", "--config", cfg});
  CHECK(file.code == 2);
  CHECK(file.err.find("window") != std::string::npos);
  std::remove(cfg.c_str());
}

TEST_CASE("precision failures exit with 3") {
  auto r = run({"tune", "--depth", "12", "--bits", "53"});
  CHECK(r.code == 3);
  CHECK(r.err.find("--bits") != std::string::npos);
}

TEST_CASE("a saved output re-runs to the same bytes") {
  const std::string saved = temp_path("saved.txt");
  auto first = run({"--output", saved, "enumscale", "--to", "30", "--depth", "12"});
  REQUIRE(first.code == 0);
  CHECK(first.out.empty());
  std::stringstream buf;
  buf << std::ifstream(saved).rdbuf();
  auto again = run({"--config", saved});
  REQUIRE(again.code == 0);
  CHECK(again.out == buf.str());

  // Flags override the file.
  auto narrowed = run({"enumscale", "--config", saved, "--to", "3"});
  REQUIRE(narrowed.code == 0);
  CHECK(lines_starting(narrowed.out, "enum ").size() == 4);

  auto wrong = run({"loops", "--config", saved});
  CHECK(wrong.code == 2);
  std::remove(saved.c_str());
}

TEST_CASE("config text parsing") {
  auto m = lyk::cli::parse_config_text("# comment\n depth = 12 \nq=fib\n");
  CHECK(m.size() == 2);
  CHECK(m["depth"] == "12");
  CHECK(m["q"] == "fib");
  auto saved = lyk::cli::parse_config_text("#config command = loops\nedge loop=A from=3\nsummary x=1\n");
  CHECK(saved.size() == 1);
  CHECK(saved["command"] == "loops");
  CHECK_THROWS_AS(lyk::cli::parse_config_text("depth 12\n"), lyk::InputError);
}

TEST_CASE("other subcommands produce records and a summary") {
  auto loops = run({"loops", "--q", "fib", "--kappa", "3", "--kappa-hat", "4"});
  REQUIRE(loops.code == 0);
  auto s = lines_starting(loops.out, "summary")[0];
  CHECK(field(s, "length_a") == "8");
  CHECK(field(s, "equal") == "yes");

  auto push = run({"limsup-full", "--map", "logistic a:4", "--a", "0.3:0.31", "--n-max", "30"});
  REQUIRE(push.code == 0);
  CHECK(lines_starting(push.out, "push ").size() == 31);

  auto entry = run({"entry-map", "--map", "logistic a:4", "--points", "20", "--horizon", "200"});
  REQUIRE(entry.code == 0);
  CHECK(lines_starting(entry.out, "entry ").size() == 20);

  auto degenerate = run({"tower", "--map", "logistic a:4", "--steps", "50"});
  CHECK(degenerate.code == 2);
  auto tower = run({"tower", "--map", "logistic a:3.9", "--x", "0.3", "--steps", "50"});
  REQUIRE(tower.code == 0);
  CHECK(lines_starting(tower.out, "level ").size() == 50);
  CHECK(field(lines_starting(tower.out, "summary")[0], "transitions") == "ok");

  auto drift = run({"drift", "--map", "logistic a:3.9", "--tune-q", "feigenbaum", "--tune-depth", "8", "--samples", "5",
                    "--steps", "500", "--threads", "2"});
  REQUIRE(drift.code == 0);
  CHECK(field(lines_starting(drift.out, "summary")[0], "increments") == "0,1");

  auto tune = run({"tune", "--depth", "8"});
  REQUIRE(tune.code == 0);
  CHECK(lines_starting(tune.out, "S ").size() == 9);
}
