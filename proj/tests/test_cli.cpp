#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "channelstab/cli.hpp"
#include "channelstab/io.hpp"
#include "fixtures.hpp"

using namespace cstab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "channelstab");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("channelstab_cli_" + name);
  fs::remove_all(p);
  return p;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

const std::vector<std::string> kWeak = {"--n", "32", "--nu", "100", "--C_U", "1", "--scan-limit", "4", "--threads", "1"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("usage and configuration errors") {
  CHECK(run({"--help"}).code == kExitPass);
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"steady", "--eps", "-1", "--out", scratch("eps").string()}).code == kExitConfig);
  CHECK(run({"steady", "--n", "15", "--out", scratch("n15").string()}).code == kExitConfig);
  CHECK(run({"steady", "--bogus"}).code == kExitConfig);
  const fs::path dir = scratch("badcfg");
  ensure_dir(dir);
  write_text(dir / "c.json", "{\"bogus_key\": 1}");
  const Run r = run({"steady", "--config", (dir / "c.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == kExitConfig);
  CHECK(contains(r.err, "bogus_key"));
  CHECK(run({"steady", "--config", (dir / "missing.json").string()}).code == kExitConfig);
  fs::remove_all(dir);
}

TEST_CASE("steady subcommand") {
  const fs::path dir = scratch("steady");
  const Run r = run({"steady", "--n", "32", "--phi-tg", "plus", "--out", dir.string()});
  CHECK(r.code == kExitPass);
  CHECK(contains(r.out, "gamma = 2\n"));
  CHECK(fs::exists(dir / "steady.json"));
  CHECK(fs::exists(dir / "profile.csv"));
  CHECK(fs::exists(dir / "run_config.json"));
  CHECK(std::abs(read_json(dir / "steady.json").at("gamma").get<double>() - 2.0) <= 1e-14);
  fs::remove_all(dir);
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path dir = scratch("override");
  ensure_dir(dir);
  write_text(dir / "c.json", "{\"n\": 32, \"phi_tg\": \"plus\", \"params\": {\"alpha\": 3.0}}");
  const Run a = run({"steady", "--config", (dir / "c.json").string(), "--out", (dir / "a").string()});
  CHECK(a.code == kExitPass);
  CHECK(contains(a.out, "gamma = 6\n"));
  const Run b =
      run({"steady", "--config", (dir / "c.json").string(), "--alpha", "0.5", "--out", (dir / "b").string()});
  CHECK(b.code == kExitPass);
  CHECK(contains(b.out, "gamma = 1\n"));
  fs::remove_all(dir);
}

TEST_CASE("output directory from the environment") {
  const fs::path env = scratch("env");
  const fs::path flag = scratch("flag");
  ::setenv("CHANNELSTAB_OUT", env.string().c_str(), 1);
  CHECK(run({"steady", "--n", "32", "--phi-tg", "plus"}).code == kExitPass);
  CHECK(fs::exists(env / "steady.json"));
  CHECK(run({"steady", "--n", "32", "--phi-tg", "plus", "--out", flag.string()}).code == kExitPass);
  CHECK(fs::exists(flag / "steady.json"));
  ::unsetenv("CHANNELSTAB_OUT");
  fs::remove_all(env);
  fs::remove_all(flag);
}

TEST_CASE("stable flow needs no gains") {
  const fs::path dir = scratch("weak");
  const Run s = run(with({"spectrum", "--out", dir.string()}, kWeak));
  CHECK(s.code == kExitPass);
  CHECK(contains(s.out, "no unstable modes, M=1"));
  CHECK(fs::exists(dir / "cutoff.json"));
  CHECK(fs::exists(dir / "spectrum.csv"));
  CHECK(read_json(dir / "cutoff.json").at("M").get<int>() == 1);
  const Run g = run(with({"gains", "--out", dir.string()}, kWeak));
  CHECK(g.code == kExitPass);
  CHECK(contains(g.out, "no gains needed"));
  fs::remove_all(dir);
}

TEST_CASE("zero initial condition has zero energy and no decay fit") {
  const fs::path dir = scratch("zero");
  const Run r = run(with({"simulate", "--out", dir.string(), "--ic", "zero", "--T", "0.01", "--K-max", "1"}, kWeak));
  CHECK(r.code == kExitCriterion);
  const std::string csv = read_text(dir / "energies.csv");
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("t,E_0_0", 0) == 0);
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    const std::string values = line.substr(line.find(',') + 1);
    for (char c : values) CHECK((c == '0' || c == ','));
  }
  CHECK(rows == 2);
  CHECK_FALSE(read_json(dir / "decay_report.json").at("pass").get<bool>());
  fs::remove_all(dir);
}

TEST_CASE("cached upstream artifacts are reused") {
  const fs::path a = scratch("cache_a");
  const fs::path b = scratch("cache_b");
  REQUIRE(run({"steady", "--n", "32", "--phi-tg", "plus", "--out", a.string()}).code == kExitPass);
  nlohmann::json st = read_json(a / "steady.json");
  st["gamma"] = 7.25;
  write_json(a / "steady.json", st);
  const Run hit = run({"steady", "--n", "32", "--phi-tg", "plus", "--from", a.string(), "--out", b.string()});
  CHECK(hit.code == kExitPass);
  CHECK(contains(hit.out, "using cached steady state"));
  CHECK(contains(hit.out, "gamma = 7.25\n"));
  CHECK(read_json(b / "steady.json").at("gamma").get<double>() == 7.25);
  const Run miss = run({"steady", "--n", "32", "--phi-tg", "plus", "--eps", "0.02", "--from", a.string(), "--out",
                        b.string()});
  CHECK(miss.code == kExitPass);
  CHECK_FALSE(contains(miss.out, "using cached"));
  CHECK(contains(miss.out, "gamma = 2\n"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("forced actuator coefficient with vanishing margin fails the run") {
  const EigenSet& e = *fixtures::controls64().eig_for({1, 1});
  const cd bad = -e.traces[0].first / e.traces[0].second;
  const fs::path dir = scratch("bad_a");
  const Run r = run({"gains", "--out", dir.string(), "--threads", "1", "--a", fmt(bad.real()) + "," + fmt(bad.imag())});
  CHECK(r.code == kExitCriterion);
  CHECK(contains(r.err, "lemma-violation"));
  const Run ok = run({"gains", "--from", dir.string(), "--out", dir.string(), "--threads", "1"});
  CHECK(ok.code == kExitPass);
  CHECK(fs::exists(dir / "gains.json"));
  CHECK(fs::exists(dir / "gains" / "gains_1_1.json"));
  CHECK(contains(ok.out, "using cached cutoff"));
  fs::remove_all(dir);
}

TEST_CASE("verify runs a single criterion") {
  const fs::path dir = scratch("verify");
  const Run r = run({"verify", "--criterion", "1", "--out", dir.string(), "--threads", "1"});
  CHECK(r.code == kExitPass);
  CHECK(contains(r.out, "PASS"));
  const nlohmann::json j = read_json(dir / "verify_report.json");
  CHECK(j.at("results").size() == 1);
  CHECK(run({"verify", "--criterion", "12", "--out", dir.string()}).code == kExitConfig);
  fs::remove_all(dir);
}
