#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "pesao/pesao.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("pesao_capi_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  pesao_free_string(s);
  return out;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(pesao_version()) > 0);
  CHECK(std::string(pesao_status_name(PESAO_E_PARSE)) == "parse");
  CHECK(std::string(pesao_status_name(PESAO_OK)) == "ok");
}

TEST_CASE("library round trip through a file") {
  pesao_library* lib = nullptr;
  REQUIRE(pesao_library_generate(5, &lib) == PESAO_OK);
  CHECK(pesao_library_size(lib) == 12);
  uint64_t n = 0;
  REQUIRE(pesao_library_count_configurations(lib, -1, -1, -1, &n) == PESAO_OK);
  CHECK(n == 378);
  CHECK(pesao_library_count_configurations(lib, 7, -1, -1, &n) == PESAO_E_INVALID_ARGUMENT);

  const auto dir = scratch("lib");
  fs::create_directories(dir);
  const auto path = (dir / "objects.txt").string();
  REQUIRE(pesao_library_write(lib, path.c_str()) == PESAO_OK);
  pesao_library* back = nullptr;
  REQUIRE(pesao_library_read(path.c_str(), &back) == PESAO_OK);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(pesao_library_text(lib, &a) == PESAO_OK);
  REQUIRE(pesao_library_text(back, &b) == PESAO_OK);
  CHECK(take(a) == take(b));

  // A tampered voxel no longer matches the recorded seed.
  {
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto nl = text.find('\n');
    text.insert(nl + 1, "40 40 40\n");
    std::ofstream(path) << text;
  }
  pesao_library* bad = nullptr;
  CHECK(pesao_library_read(path.c_str(), &bad) == PESAO_E_VALIDATION);
  CHECK(std::strlen(pesao_last_error()) > 0);
  CHECK(pesao_library_read((dir / "missing").string().c_str(), &bad) == PESAO_E_IO);

  pesao_library_free(back);
  pesao_library_free(lib);
  fs::remove_all(dir);
}

TEST_CASE("state space") { CHECK(pesao_state_space_size() == 38211264000ULL); }

TEST_CASE("trial, trace and metrics") {
  pesao_library* lib = nullptr;
  REQUIRE(pesao_library_generate(1, &lib) == PESAO_OK);
  pesao_trace* t = nullptr;
  pesao_answer ans = PESAO_DIFFERENT;
  REQUIRE(pesao_run_trial(lib, "trial 1 E1 E1 same 90 corner easy 7", nullptr, 0, 3, &t, &ans) == PESAO_OK);
  CHECK(ans == PESAO_SAME);
  pesao_metrics m{};
  REQUIRE(pesao_trace_metrics(t, &m) == PESAO_OK);
  CHECK(m.fixations >= 6);
  CHECK(m.response_time_s > 0.0);

  const auto dir = scratch("trace");
  fs::create_directories(dir);
  const auto path = (dir / "x.trace").string();
  REQUIRE(pesao_trace_write(t, path.c_str()) == PESAO_OK);
  pesao_trace* back = nullptr;
  REQUIRE(pesao_trace_read(path.c_str(), &back) == PESAO_OK);
  char* a = nullptr;
  char* b = nullptr;
  pesao_trace_text(t, &a);
  pesao_trace_text(back, &b);
  CHECK(take(a) == take(b));

  pesao_trace* none = nullptr;
  CHECK(pesao_run_trial(lib, "trial nonsense", nullptr, 0, 3, &none, nullptr) == PESAO_E_PARSE);
  CHECK(none == nullptr);
  CHECK(pesao_run_trial(nullptr, "x", nullptr, 0, 3, &none, nullptr) == PESAO_E_INVALID_ARGUMENT);

  pesao_trace_free(back);
  pesao_trace_free(t);
  pesao_library_free(lib);
  fs::remove_all(dir);
}

TEST_CASE("experiment, mining and report") {
  const auto dir = scratch("batch");
  fs::create_directories(dir);
  const auto plan = (dir / "plan.txt").string();
  std::ofstream(plan) << "library_seed = 1\nsessions = 1\nnoise = on\n";
  int trials = 0, failed = -1;
  REQUIRE(pesao_run_experiment(plan.c_str(), 1, 8, (dir / "run").string().c_str(), &trials, &failed) == PESAO_OK);
  CHECK(trials == 18);
  CHECK(failed == 0);
  int mined = 0;
  REQUIRE(pesao_mine((dir / "run" / "traces").string().c_str(), 0.1, (dir / "mined").string().c_str(), &mined) ==
          PESAO_OK);
  CHECK(mined == 18);
  CHECK(fs::exists(dir / "mined" / "methods.lib"));
  CHECK(pesao_mine((dir / "run").string().c_str(), 0.0, (dir / "m2").string().c_str(), &mined) ==
        PESAO_E_INVALID_ARGUMENT);
  REQUIRE(pesao_report((dir / "run").string().c_str(), (dir / "report").string().c_str()) == PESAO_OK);
  CHECK(fs::exists(dir / "report" / "learning.tsv"));
  CHECK(pesao_report((dir / "mined").string().c_str(), (dir / "r2").string().c_str()) == PESAO_E_IO);
  CHECK(pesao_run_experiment((dir / "nope.txt").string().c_str(), 0, 0, "x", nullptr, nullptr) != PESAO_OK);
  fs::remove_all(dir);
}
