#include "nilwb/nilwb.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification suite for torsion-free nilpotent groups"};
  app.set_version_flag("--version", std::string(NILWB_VERSION));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the verification suite on a group spec");
  std::string spec_path, out_path, format = "json";
  std::optional<std::string> checks;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> ball_radius;
  std::optional<long> eps_bound;
  bool timing = false;
  run->add_option("spec", spec_path, "Group spec (JSON)")->required();
  run->add_option("--checks", checks, "Comma-separated subset of checks (empty: none)");
  run->add_option("--seed", seed, "Seed override");
  run->add_option("--out", out_path, "Write the report here instead of stdout");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  run->add_option("--ball-radius", ball_radius, "Ball radius override");
  run->add_option("--eps-bound", eps_bound, "Eps search bound override")->check(CLI::PositiveNumber);
  run->add_flag("--timing", timing, "Add per-check wall time to the report");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cannot read " + spec_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const nilwb::GroupSpec spec = nilwb::parse_spec(buf.str());

    nilwb::SuiteOptions opt;
    if (checks) opt.checks = split_list(*checks);
    opt.seed = seed;
    opt.ball_radius = ball_radius;
    opt.eps_bound = eps_bound;
    opt.timing = timing;
    const nilwb::Report report = nilwb::run_suite(spec, opt);
    const std::string text = nilwb::emit_report(report, format);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      out << text;
    }
    return report.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "workbench: " << e.what() << "\n";
    return 1;
  }
}
