// pesao-sim: command-line front end over the C interface.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "pesao/pesao.h"

namespace {

int report_failure(const char* what, pesao_status s) {
  std::fprintf(stderr, "pesao-sim: %s failed (%s): %s\n", what, pesao_status_name(s), pesao_last_error());
  return 1;
}

std::string out_dir(const std::string& requested) {
  char* s = nullptr;
  if (pesao_resolve_out_dir(requested.c_str(), &s) != PESAO_OK) return requested;
  std::string r = s;
  pesao_free_string(s);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated same/different mental-rotation experiments"};
  app.set_version_flag("--version", std::string(pesao_version()));
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  auto* gen = app.add_subcommand("gen-objects", "generate a block-object library");
  std::uint64_t gen_seed = 1;
  std::string gen_out = "objects.txt";
  gen->add_option("--seed", gen_seed, "library seed");
  gen->add_option("--out", gen_out, "library file to write");

  auto* run = app.add_subcommand("run", "run an experiment plan");
  std::string plan;
  std::uint64_t seed = 0;
  std::string run_out = "out";
  run->add_option("--plan", plan, "plan file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "master seed (overrides the plan)");
  run->add_option("--out", run_out, "output directory");

  auto* mine = app.add_subcommand("mine", "mine strategies from a trace directory");
  std::string traces;
  double support = 0.1;
  std::string mine_out = "mined";
  mine->add_option("--traces", traces, "directory of .trace files")->required();
  mine->add_option("--min-support", support, "minimum support fraction")->check(CLI::Range(0.0, 1.0));
  mine->add_option("--out", mine_out, "output directory");

  auto* report = app.add_subcommand("report", "summaries and plots from a results directory");
  std::string results = ".";
  std::string report_out;
  report->add_option("--results", results, "directory holding results.tsv");
  report->add_option("--out", report_out, "output directory (default: the results directory)");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    pesao_library* lib = nullptr;
    if (auto s = pesao_library_generate(gen_seed, &lib); s != PESAO_OK) return report_failure("gen-objects", s);
    const auto s = pesao_library_write(lib, gen_out.c_str());
    const auto n = pesao_library_size(lib);
    pesao_library_free(lib);
    if (s != PESAO_OK) return report_failure("gen-objects", s);
    std::printf("%zu objects -> %s\n", n, gen_out.c_str());
    return 0;
  }
  if (run->parsed()) {
    if (!std::filesystem::exists(plan)) {
      std::fprintf(stderr, "pesao-sim: no such plan file: %s\n", plan.c_str());
      return 1;
    }
    const auto dir = out_dir(run_out);
    int trials = 0, failed = 0;
    const auto s = pesao_run_experiment(plan.c_str(), seed_opt->count() > 0, seed, dir.c_str(), &trials, &failed);
    if (s != PESAO_OK) return report_failure("run", s);
    std::printf("%d trials -> %s\n", trials, dir.c_str());
    if (failed) {
      std::fprintf(stderr, "pesao-sim: %d trials failed; first: %s\n", failed, pesao_last_error());
      return 2;
    }
    return 0;
  }
  if (mine->parsed()) {
    if (!std::filesystem::is_directory(traces)) {
      std::fprintf(stderr, "pesao-sim: no such trace directory: %s\n", traces.c_str());
      return 1;
    }
    const auto dir = out_dir(mine_out);
    int n = 0;
    if (auto s = pesao_mine(traces.c_str(), support, dir.c_str(), &n); s != PESAO_OK) return report_failure("mine", s);
    std::printf("%d traces mined -> %s\n", n, dir.c_str());
    return 0;
  }
  const auto dir = out_dir(report_out.empty() ? results : report_out);
  if (auto s = pesao_report(results.c_str(), dir.c_str()); s != PESAO_OK) return report_failure("report", s);
  std::printf("report -> %s\n", dir.c_str());
  return 0;
}
