// oskit: batch front end for the operator-system calculus.
//
// Subcommands:
//   paper-examples        run the built-in counterexample instances
//   check <file>          run every problem in a JSON instance file
//   campaign <flags>      randomized interpolation/extension campaigns
//
// Exit codes: 0 all expectations met, 1 verdict mismatch or violation,
// 2 input error, 3 solver Unknown on a required decision. The default
// tolerance is 1e-9, overridable with --tol or the OSKIT_TOL environment
// variable. With --out PREFIX the machine-readable report is written to
// PREFIX.json beside the human-readable PREFIX.txt.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "oskit/io.hpp"

namespace {

std::optional<double> env_tolerance() {
  const char* env = std::getenv("OSKIT_TOL");
  if (!env) return std::nullopt;
  try {
    return std::stod(env);
  } catch (...) {
    std::cerr << "oskit: ignoring malformed OSKIT_TOL value '" << env << "'\n";
    return std::nullopt;
  }
}

int emit(const oskit::RunReport& report, const std::string& out_prefix) {
  if (!out_prefix.empty()) {
    std::ofstream machine(out_prefix + ".json");
    machine << report.machine_json;
    std::ofstream human(out_prefix + ".txt");
    human << report.human_text;
    if (!machine || !human) {
      std::cerr << "oskit: failed to write reports at prefix " << out_prefix << "\n";
      return 2;
    }
    std::cout << report.human_text;
    std::cout << "reports: " << out_prefix << ".json, " << out_prefix << ".txt\n";
  } else {
    std::cout << report.human_text;
  }
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator-system interpolation, extension and cone decision procedures"};
  app.require_subcommand(1);
  app.fallthrough();  // --tol/--out may follow the subcommand

  double tol_flag = -1.0;
  std::string out_prefix;
  app.add_option("--tol", tol_flag, "override the solver tolerance");
  app.add_option("--out", out_prefix, "report file prefix");

  auto* paper = app.add_subcommand("paper-examples", "run the built-in counterexample data");

  std::string check_file;
  auto* check = app.add_subcommand("check", "run problems from a JSON instance file");
  check->add_option("file", check_file, "instance file")->required();

  std::string family = "diagonal-in-full";
  int count = 100, level = 1, cap = 4;
  std::uint64_t seed = 1;
  std::vector<int> nk = {2, 2};
  auto* campaign = app.add_subcommand("campaign", "randomized interpolation campaigns");
  campaign->add_option("--family", family,
                       "diagonal-in-full | block-diagonal-in-full | linf-in-linf | "
                       "namioka-phelps");
  campaign->add_option("--count", count, "number of instances");
  campaign->add_option("--seed", seed, "campaign seed");
  campaign->add_option("--level", level, "matrix level (amplification)");
  campaign->add_option("--nk", nk, "interpolation shape n k")->expected(2);
  campaign->add_option("--cap", cap, "ambient dimension cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag errors are input errors
  }

  std::optional<double> tol = env_tolerance();
  if (tol_flag >= 0.0) tol = tol_flag;

  try {
    if (paper->parsed()) {
      return emit(oskit::run_paper_examples(tol), out_prefix);
    }
    if (check->parsed()) {
      std::ifstream in(check_file);
      if (!in) {
        std::cerr << "oskit: cannot open " << check_file << "\n";
        return 2;
      }
      std::stringstream buffer;
      buffer << in.rdbuf();
      return emit(oskit::run_instance_file(buffer.str(), tol), out_prefix);
    }
    if (campaign->parsed()) {
      auto fam = oskit::pair_family_from_string(family);
      if (!fam) {
        std::cerr << "oskit: unknown family '" << family << "'\n";
        return 2;
      }
      oskit::CampaignConfig cfg;
      cfg.pair_family = *fam;
      cfg.instance_count = count;
      cfg.seed = seed;
      cfg.matrix_level = level;
      cfg.dimension_cap = cap;
      cfg.n = nk[0];
      cfg.k = nk[1];
      cfg.tol = tol.value_or(1e-9);
      return emit(oskit::run_campaign_report(cfg), out_prefix);
    }
  } catch (const oskit::ParseError& err) {
    std::cerr << "oskit: input error: " << err.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "oskit: input error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "oskit: error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
