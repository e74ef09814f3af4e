#include <filesystem>
#include <iomanip>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "channelstab/errors.hpp"
#include "channelstab/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> criteria;
  std::string config;
  std::string out = "acceptance_out";
  app.add_option("--criterion", criteria, "criterion number (all when omitted)")->check(CLI::Range(1, 9));
  app.add_option("--config", config, "JSON configuration file");
  app.add_option("--out", out, "scratch directory");
  CLI11_PARSE(app, argc, argv);

  if (criteria.empty())
    for (int i = 1; i <= cstab::kCriterionCount; ++i) criteria.push_back(i);

  bool all = true;
  for (int id : criteria) {
    cstab::CriterionResult r;
    r.id = id;
    r.name = cstab::criterion_name(id);
    try {
      cstab::RunConfig cfg = config.empty() ? cstab::RunConfig{} : cstab::load_config(config);
      cfg.output_dir = (std::filesystem::path(out) / ("criterion_" + std::to_string(id))).string();
      std::filesystem::remove_all(cfg.output_dir);
      cstab::VerifySuite suite(cfg);
      r = suite.run(id);
    } catch (const cstab::Error& e) {
      r.pass = false;
      r.detail = std::string(cstab::to_string(e.kind())) + ": " + e.what();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = e.what();
    }
    all = all && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << id << " " << r.name << ": " << r.detail << " ["
              << std::setprecision(3) << r.seconds << " s]" << std::endl;
  }
  return all ? 0 : 2;
}
