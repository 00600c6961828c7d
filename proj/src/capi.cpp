#include "pesao/pesao.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pesao/engine.hpp"
#include "pesao/harness.hpp"
#include "pesao/objectgen.hpp"
#include "pesao/scenario.hpp"
#include "pesao/tracefmt.hpp"

struct pesao_library {
  pesao::ObjectLibrary lib;
};

struct pesao_trace {
  pesao::Trace trace;
};

namespace {

thread_local std::string g_last_error;

pesao_status fail(pesao_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

pesao_status null_arg(const char* name) {
  return fail(PESAO_E_INVALID_ARGUMENT, std::string(name) + " is null");
}

// Runs f, mapping exceptions onto status codes.
template <class F>
pesao_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return PESAO_OK;
  } catch (const pesao::Error& e) {
    return fail(static_cast<pesao_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PESAO_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PESAO_E_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

pesao::ObjectLibrary rebuild(const std::vector<pesao::ObjectRecord>& records) {
  using namespace pesao;
  ObjectLibrary lib;
  for (const auto& r : records) {
    auto obj = generate_object(r.complexity, r.seed);
    if (obj.voxels() != r.voxels)
      throw Error(ErrorCode::Validation, "object " + r.id + ": voxels do not match its seed");
    obj.id = r.id;
    lib.objects.push_back(std::move(obj));
  }
  if (auto err = validate(lib)) throw Error(ErrorCode::Validation, *err);
  return lib;
}

}  // namespace

extern "C" {

const char* pesao_version(void) { return "1.0.0"; }

const char* pesao_last_error(void) { return g_last_error.c_str(); }

const char* pesao_status_name(pesao_status s) {
  switch (s) {
    case PESAO_OK: return "ok";
    case PESAO_E_INVALID_ARGUMENT: return "invalid argument";
    case PESAO_E_IO: return "io";
    case PESAO_E_PARSE: return "parse";
    case PESAO_E_VALIDATION: return "validation";
    case PESAO_E_GENERATION_EXHAUSTED: return "generation exhausted";
    case PESAO_E_UNBOUND_PARAMETER: return "unbound parameter";
    case PESAO_E_CONFIGURATION: return "configuration";
    case PESAO_E_INCOMPLETE: return "incomplete";
    case PESAO_E_INTERNAL: return "internal";
  }
  return "unknown";
}

void pesao_free_string(char* s) { std::free(s); }

pesao_status pesao_library_generate(uint64_t seed, pesao_library** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new pesao_library{pesao::generate_library(seed)}; });
}

pesao_status pesao_library_read(const char* path, pesao_library** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw pesao::Error(pesao::ErrorCode::Io, std::string("cannot open ") + path);
    *out = new pesao_library{rebuild(pesao::read_library(in))};
  });
}

pesao_status pesao_library_write(const pesao_library* lib, const char* path) {
  if (!lib) return null_arg("lib");
  if (!path) return null_arg("path");
  return guarded([&] {
    std::ostringstream os;
    pesao::write_library(os, lib->lib);
    pesao::write_atomically(path, os.str());
  });
}

pesao_status pesao_library_text(const pesao_library* lib, char** out) {
  if (!lib) return null_arg("lib");
  if (!out) return null_arg("out");
  return guarded([&] {
    std::ostringstream os;
    pesao::write_library(os, lib->lib);
    *out = dup(os.str());
  });
}

size_t pesao_library_size(const pesao_library* lib) { return lib ? lib->lib.objects.size() : 0; }

pesao_status pesao_library_count_configurations(const pesao_library* lib, int start, int complexity,
                                                int orientation, uint64_t* out) {
  if (!lib) return null_arg("lib");
  if (!out) return null_arg("out");
  if (start < -1 || start > 2) return fail(PESAO_E_INVALID_ARGUMENT, "start out of range");
  if (complexity < -1 || complexity > 2) return fail(PESAO_E_INVALID_ARGUMENT, "complexity out of range");
  return guarded([&] {
    pesao::ConfigurationFilter f;
    if (start >= 0) f.start = static_cast<pesao::StartPosition>(start);
    if (complexity >= 0) f.complexity = static_cast<pesao::Complexity>(complexity);
    if (orientation >= 0) f.orientation_diff = orientation;
    *out = pesao::count_configurations(lib->lib, f);
  });
}

void pesao_library_free(pesao_library* lib) { delete lib; }

uint64_t pesao_state_space_size(void) { return pesao::state_space_size(pesao::StateQuantization{}); }

pesao_status pesao_run_trial(const pesao_library* lib, const char* trial_line, const char* strategy_path,
                             int noise, uint64_t seed, pesao_trace** out, pesao_answer* answer) {
  if (!lib) return null_arg("lib");
  if (!trial_line) return null_arg("trial_line");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto config = pesao::parse_trial_line(trial_line);
    const auto strategies = strategy_path ? pesao::read_library_file(strategy_path) : pesao::default_library();
    const auto model = noise ? pesao::NoiseModel::measured() : pesao::NoiseModel{};
    auto r = pesao::run_trial(config, lib->lib, strategies, model, seed);
    if (answer) *answer = r.answer == pesao::GroundTruth::Same ? PESAO_SAME : PESAO_DIFFERENT;
    *out = new pesao_trace{std::move(r.trace)};
  });
}

pesao_status pesao_trace_read(const char* path, pesao_trace** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new pesao_trace{pesao::read_trace_file(path)}; });
}

pesao_status pesao_trace_write(const pesao_trace* trace, const char* path) {
  if (!trace) return null_arg("trace");
  if (!path) return null_arg("path");
  return guarded([&] { pesao::write_atomically(path, pesao::write_trace(trace->trace)); });
}

pesao_status pesao_trace_text(const pesao_trace* trace, char** out) {
  if (!trace) return null_arg("trace");
  if (!out) return null_arg("out");
  return guarded([&] { *out = dup(pesao::write_trace(trace->trace)); });
}

pesao_status pesao_trace_metrics(const pesao_trace* trace, pesao_metrics* out) {
  if (!trace) return null_arg("trace");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto m = pesao::trace_metrics(trace->trace);
    out->fixations = m.fixation_count;
    out->head_movement_m = m.head_path_m;
    out->response_time_s = m.response_time_s;
  });
}

void pesao_trace_free(pesao_trace* trace) { delete trace; }

pesao_status pesao_run_experiment(const char* plan_path, int override_seed, uint64_t master_seed,
                                  const char* out_dir, int* trials, int* failed) {
  if (!plan_path) return null_arg("plan_path");
  if (!out_dir) return null_arg("out_dir");
  return guarded([&] {
    auto plan = pesao::read_plan_file(plan_path);
    if (override_seed) plan.master_seed = master_seed;
    const auto res = pesao::run_experiment(plan, out_dir);
    if (trials) *trials = static_cast<int>(res.rows.size());
    if (failed) *failed = static_cast<int>(res.errors.size());
    if (!res.errors.empty()) g_last_error = res.errors.front();
  });
}

pesao_status pesao_mine(const char* trace_dir, double min_support, const char* out_dir, int* mined) {
  if (!trace_dir) return null_arg("trace_dir");
  if (!out_dir) return null_arg("out_dir");
  if (!(min_support > 0.0 && min_support <= 1.0))
    return fail(PESAO_E_INVALID_ARGUMENT, "min_support must be in (0, 1]");
  return guarded([&] {
    const int n = pesao::mine_directory(trace_dir, out_dir, min_support);
    if (mined) *mined = n;
  });
}

pesao_status pesao_report(const char* results_dir, const char* out_dir) {
  if (!results_dir) return null_arg("results_dir");
  if (!out_dir) return null_arg("out_dir");
  return guarded([&] {
    const auto path = (std::filesystem::path(results_dir) / "results.tsv").string();
    if (!std::filesystem::exists(path)) throw pesao::Error(pesao::ErrorCode::Io, "no results file: " + path);
    pesao::write_report(pesao::read_results_file(path), out_dir);
  });
}

pesao_status pesao_resolve_out_dir(const char* requested, char** out) {
  if (!requested) return null_arg("requested");
  if (!out) return null_arg("out");
  return guarded([&] { *out = dup(pesao::resolve_out_dir(requested)); });
}

}  // extern "C"
