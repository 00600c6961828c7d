#include "pesao/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "pesao/miner.hpp"

namespace fs = std::filesystem;

namespace pesao {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& v, std::size_t line) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) throw ParseError(line, "expected an unsigned integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ParseError(line, "integer out of range: " + v);
  }
}

}  // namespace

/// Writes through a temporary file so readers never see a partial file.
void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp + " to " + path + ": " + ec.message());
}

ExperimentPlan parse_plan(std::istream& is) {
  ExperimentPlan p;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(n, "expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "library_seed") {
      p.library_seed = parse_u64(value, n);
    } else if (key == "sessions") {
      const auto s = parse_u64(value, n);
      if (s < 1 || s > 100000) throw ParseError(n, "sessions must be in 1..100000");
      p.sessions = static_cast<int>(s);
    } else if (key == "noise") {
      if (value == "on" || value == "true" || value == "1")
        p.noise = true;
      else if (value == "off" || value == "false" || value == "0")
        p.noise = false;
      else
        throw ParseError(n, "noise must be on or off");
    } else if (key == "master_seed") {
      p.master_seed = parse_u64(value, n);
    } else if (key == "strategy_library") {
      p.strategy_library = value;
    } else if (key == "threads") {
      p.threads = static_cast<int>(std::min<std::uint64_t>(parse_u64(value, n), 1024));
    } else {
      throw ParseError(n, "unknown key '" + key + "'");
    }
  }
  return p;
}

ExperimentPlan parse_plan_string(const std::string& text) {
  std::istringstream is(text);
  return parse_plan(is);
}

ExperimentPlan read_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open plan file " + path);
  auto plan = parse_plan(in);
  // Library paths are relative to the plan file.
  if (!plan.strategy_library.empty() && fs::path(plan.strategy_library).is_relative())
    plan.strategy_library = (fs::path(path).parent_path() / plan.strategy_library).string();
  return plan;
}

std::string write_plan(const ExperimentPlan& p) {
  std::ostringstream os;
  os << "library_seed = " << p.library_seed << "\nsessions = " << p.sessions
     << "\nnoise = " << (p.noise ? "on" : "off") << "\nmaster_seed = " << p.master_seed << '\n';
  if (!p.strategy_library.empty()) os << "strategy_library = " << p.strategy_library << '\n';
  if (p.threads) os << "threads = " << p.threads << '\n';
  return os.str();
}

std::uint64_t session_seed(std::uint64_t master, int session) {
  return mix_seed(master, static_cast<std::uint64_t>(session), 0x5e55);
}

std::uint64_t trial_seed(std::uint64_t master, int session, int trial) {
  return mix_seed(master, static_cast<std::uint64_t>(session), static_cast<std::uint64_t>(trial));
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const std::string& out_dir) {
  if (plan.sessions < 1) throw Error(ErrorCode::InvalidArgument, "plan needs at least one session");
  const auto objects = generate_library(plan.library_seed);
  const auto strategies = plan.strategy_library.empty() ? default_library() : read_library_file(plan.strategy_library);
  const auto noise = plan.noise ? NoiseModel::measured() : NoiseModel{};

  std::vector<TrialConfig> configs;
  for (int s = 1; s <= plan.sessions; ++s)
    for (auto& c : sample_session(objects, session_seed(plan.master_seed, s))) configs.push_back(c);

  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "traces", ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());
  }

  const std::size_t total = configs.size();
  std::vector<ResultsRow> rows(total);
  std::vector<std::string> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) {
      const int session = static_cast<int>(i / kTrialsPerSession) + 1;
      const auto& c = configs[i];
      auto& row = rows[i];
      row.session = session;
      row.trial = c.trial_index;
      row.complexity = c.complexity;
      row.start = c.start;
      row.orientation = c.orientation_diff;
      row.ground_truth = c.ground_truth;
      try {
        auto r = run_trial(c, objects, strategies, noise, trial_seed(plan.master_seed, session, c.trial_index));
        const auto m = trace_metrics(r.trace);
        row.answer = r.answer;
        row.correct = r.trace.correct;
        row.fixations = m.fixation_count;
        row.head_movement_m = quantize6(m.head_path_m);
        row.response_time_s = quantize6(m.response_time_s);
        if (!out_dir.empty()) {
          char name[64];
          std::snprintf(name, sizeof name, "s%02d_t%02d.trace", session, c.trial_index);
          write_atomically((fs::path(out_dir) / "traces" / name).string(), write_trace(r.trace));
        }
      } catch (const std::exception& e) {
        row.correct = row.answer == row.ground_truth;
        errors[i] = "session " + std::to_string(session) + " trial " + std::to_string(c.trial_index) + ": " + e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n = plan.threads > 0 ? static_cast<unsigned>(plan.threads) : hw;
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < std::min<std::size_t>(n, total); ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ExperimentResult out;
  out.rows = std::move(rows);
  for (auto& e : errors)
    if (!e.empty()) out.errors.push_back(std::move(e));
  if (!out_dir.empty()) write_atomically((fs::path(out_dir) / "results.tsv").string(), write_results(out.rows));
  return out;
}

// ---- results file ----

namespace {

constexpr const char* kResultsHeader =
    "session\ttrial\tcomplexity\tstart\torientation\tground_truth\tanswer\tcorrect\tfixations\thead_movement_m\t"
    "response_time_s";

}  // namespace

void write_results(std::ostream& os, const std::vector<ResultsRow>& rows) {
  os << kResultsHeader << '\n';
  for (const auto& r : rows)
    os << r.session << '\t' << r.trial << '\t' << to_string(r.complexity) << '\t' << to_string(r.start) << '\t'
       << r.orientation << '\t' << to_string(r.ground_truth) << '\t' << to_string(r.answer) << '\t'
       << (r.correct ? 1 : 0) << '\t' << r.fixations << '\t' << format6(r.head_movement_m) << '\t'
       << format6(r.response_time_s) << '\n';
}

std::string write_results(const std::vector<ResultsRow>& rows) {
  std::ostringstream os;
  write_results(os, rows);
  return os.str();
}

std::vector<ResultsRow> read_results(std::istream& is) {
  std::string line;
  std::size_t n = 1;
  if (!std::getline(is, line) || trim(line) != kResultsHeader) throw ParseError(1, "missing results header");
  std::vector<ResultsRow> rows;
  while (std::getline(is, line)) {
    ++n;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string x; std::getline(ls, x, '\t');) f.push_back(trim(x));
    if (f.size() != 11) throw ParseError(n, "expected 11 fields");
    ResultsRow r;
    try {
      r.session = std::stoi(f[0]);
      r.trial = std::stoi(f[1]);
      r.orientation = std::stoi(f[4]);
      r.fixations = std::stoi(f[8]);
      r.head_movement_m = std::stod(f[9]);
      r.response_time_s = std::stod(f[10]);
    } catch (const std::exception&) {
      throw ParseError(n, "bad number");
    }
    auto c = parse_complexity(f[2]);
    auto s = parse_start(f[3]);
    auto g = parse_ground_truth(f[5]);
    auto a = parse_ground_truth(f[6]);
    if (!c || !s || !g || !a || (f[7] != "0" && f[7] != "1")) throw ParseError(n, "bad field value");
    r.complexity = *c;
    r.start = *s;
    r.ground_truth = *g;
    r.answer = *a;
    r.correct = f[7] == "1";
    if (r.correct != (r.answer == r.ground_truth)) throw ParseError(n, "correct does not match answer");
    rows.push_back(r);
  }
  return rows;
}

std::vector<ResultsRow> read_results_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open results file " + path);
  return read_results(in);
}

// ---- summaries ----

namespace {

double metric_value(const ResultsRow& r, const std::string& metric) {
  if (metric == "accuracy") return r.correct ? 1.0 : 0.0;
  if (metric == "fixations") return r.fixations;
  if (metric == "response_time") return r.response_time_s;
  if (metric == "head_movement") return r.head_movement_m;
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + metric + "'");
}

bool known_metric(const std::string& m) {
  return m == "accuracy" || m == "fixations" || m == "response_time" || m == "head_movement";
}

using KeyPart = std::pair<int, std::string>;  // natural order, label

KeyPart dimension_value(const ResultsRow& r, int position, const std::string& dim) {
  if (dim == "complexity") return {static_cast<int>(r.complexity), std::string(to_string(r.complexity))};
  if (dim == "start") return {static_cast<int>(r.start), std::string(to_string(r.start))};
  if (dim == "sameness") return {static_cast<int>(r.ground_truth), std::string(to_string(r.ground_truth))};
  if (dim == "orientation") return {r.orientation, std::to_string(r.orientation)};
  if (dim == "trial_index") return {position, std::to_string(position)};
  throw Error(ErrorCode::InvalidArgument, "unknown dimension '" + dim + "'");
}

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

SummaryTable summarize(const std::vector<ResultsRow>& rows, const std::string& metric,
                       const std::vector<std::string>& dimensions, const std::string& name) {
  if (!known_metric(metric)) throw Error(ErrorCode::InvalidArgument, "unknown metric '" + metric + "'");
  for (const auto& d : dimensions) dimension_value(ResultsRow{}, 1, d);  // validates names
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "no rows to summarize");
  const auto pos = class_positions(rows);
  std::map<std::vector<KeyPart>, std::vector<double>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<KeyPart> key;
    for (const auto& d : dimensions) key.push_back(dimension_value(rows[i], pos[i], d));
    groups[key].push_back(metric_value(rows[i], metric));
  }
  SummaryTable t;
  t.name = name;
  t.metric = metric;
  t.dimensions = dimensions;
  for (auto& [key, v] : groups) {
    std::sort(v.begin(), v.end());
    SummaryCell c;
    for (const auto& k : key) c.key.push_back(k.second);
    c.n = static_cast<int>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    c.mean = sum / c.n;
    c.median = quantile(v, 0.5);
    c.q1 = quantile(v, 0.25);
    c.q3 = quantile(v, 0.75);
    c.min = v.front();
    c.max = v.back();
    t.cells.push_back(c);
  }
  return t;
}

const std::vector<Pairing>& standard_pairings() {
  static const std::vector<Pairing> p{
      {"accuracy_by_complexity_start", "accuracy", {"complexity", "start"}},
      {"fixations_by_complexity_sameness", "fixations", {"complexity", "sameness"}},
      {"response_time_by_complexity_start", "response_time", {"complexity", "start"}},
      {"accuracy_by_trial_index_complexity", "accuracy", {"trial_index", "complexity"}},
      {"fixations_by_trial_index_complexity", "fixations", {"trial_index", "complexity"}},
      {"head_movement_by_complexity_orientation", "head_movement", {"complexity", "orientation"}},
      {"accuracy_by_complexity_orientation", "accuracy", {"complexity", "orientation"}},
  };
  return p;
}

std::vector<SummaryTable> summarize_all(const std::vector<ResultsRow>& rows) {
  std::vector<SummaryTable> out;
  for (const auto& p : standard_pairings()) out.push_back(summarize(rows, p.metric, p.dimensions, p.name));
  return out;
}

void write_summary(std::ostream& os, const SummaryTable& t) {
  for (const auto& d : t.dimensions) os << d << '\t';
  os << "n\tmean\tmedian\tq1\tq3\tmin\tmax\n";
  for (const auto& c : t.cells) {
    for (const auto& k : c.key) os << k << '\t';
    os << c.n << '\t' << format6(c.mean) << '\t' << format6(c.median) << '\t' << format6(c.q1) << '\t'
       << format6(c.q3) << '\t' << format6(c.min) << '\t' << format6(c.max) << '\n';
  }
}

std::vector<int> class_positions(const std::vector<ResultsRow>& rows) {
  // Order within (session, complexity) by trial index, independent of row order.
  std::map<std::pair<int, int>, std::vector<int>> trials;
  for (const auto& r : rows) trials[{r.session, static_cast<int>(r.complexity)}].push_back(r.trial);
  for (auto& [k, v] : trials) std::sort(v.begin(), v.end());
  std::vector<int> out;
  for (const auto& r : rows) {
    const auto& v = trials[{r.session, static_cast<int>(r.complexity)}];
    out.push_back(static_cast<int>(std::lower_bound(v.begin(), v.end(), r.trial) - v.begin()) + 1);
  }
  return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "spearman needs two equal series of length >= 2");
  return pearson(ranks(x), ranks(y));
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "slope needs two equal series of length >= 2");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::vector<Trend> learning_effect(const std::vector<ResultsRow>& rows, const std::string& metric, int permutations,
                                   std::uint64_t seed) {
  if (!known_metric(metric)) throw Error(ErrorCode::InvalidArgument, "unknown metric '" + metric + "'");
  if (permutations < 1) throw Error(ErrorCode::InvalidArgument, "need at least one permutation");
  const auto pos = class_positions(rows);
  std::vector<Trend> out;
  for (auto c : kComplexities) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].complexity == c) {
        x.push_back(pos[i]);
        y.push_back(metric_value(rows[i], metric));
      }
    if (x.size() < 2)
      throw Error(ErrorCode::InvalidArgument, "fewer than two trials in class " + std::string(to_string(c)));
    Trend t;
    t.complexity = c;
    t.n = static_cast<int>(x.size());
    t.slope = ols_slope(x, y);
    const auto rx = ranks(x);
    auto ry = ranks(y);
    t.spearman = pearson(rx, ry);
    const double obs = std::abs(t.spearman);
    auto rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(c), 0x1ea7));
    int extreme = 0;
    for (int k = 0; k < permutations; ++k) {
      for (std::size_t i = ry.size(); i > 1; --i) std::swap(ry[i - 1], ry[uniform_index(rng, i)]);
      if (std::abs(pearson(rx, ry)) >= obs - 1e-12) ++extreme;
    }
    t.p_value = (1.0 + extreme) / (1.0 + permutations);
    out.push_back(t);
  }
  return out;
}

std::string reference_note(const std::string& metric) {
  using R = ReferenceConstants;
  char buf[160];
  if (metric == "accuracy")
    std::snprintf(buf, sizeof buf, "human reference: mean %.2f%% (sd %.1f%%)", R::accuracy * 100, R::accuracy_sd * 100);
  else if (metric == "fixations")
    std::snprintf(buf, sizeof buf, "human reference: mean %.2f, minimum %d", R::fixations, R::min_fixations);
  else if (metric == "response_time")
    std::snprintf(buf, sizeof buf, "human reference: mean %.2f s (sd %.2f), range %.1f-%.0f s", R::response_time_s,
                  R::response_time_sd, R::response_time_min_s, R::response_time_max_s);
  else if (metric == "head_movement")
    std::snprintf(buf, sizeof buf, "human reference: mean %.2f m", R::head_movement_m);
  else
    throw Error(ErrorCode::InvalidArgument, "unknown metric '" + metric + "'");
  return buf;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

}  // namespace

void write_svg(std::ostream& os, const SummaryTable& t) {
  const int slot = 90, left = 70, top = 50, plot_h = 300;
  const int width = left + slot * static_cast<int>(std::max<std::size_t>(1, t.cells.size())) + 20;
  const int height = top + plot_h + 80;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < t.cells.size(); ++i) {
    lo = i ? std::min(lo, t.cells[i].min) : t.cells[i].min;
    hi = i ? std::max(hi, t.cells[i].max) : t.cells[i].max;
  }
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  auto y = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"10\" y=\"20\" font-size=\"14\">" << xml_escape(t.name.empty() ? t.metric : t.name) << "</text>\n";
  os << "<text x=\"10\" y=\"38\" font-size=\"11\" fill=\"#555\">" << xml_escape(reference_note(t.metric)) << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n"
                "<text x=\"5\" y=\"%.1f\" font-size=\"10\">%s</text>\n<text x=\"5\" y=\"%.1f\" font-size=\"10\">%s</text>\n",
                left - 10, top, left - 10, top + plot_h, y(hi) + 4, format6(hi).c_str(), y(lo), format6(lo).c_str());
  os << buf;
  for (std::size_t i = 0; i < t.cells.size(); ++i) {
    const auto& c = t.cells[i];
    const double cx = left + slot * (static_cast<double>(i) + 0.5);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"40\" height=\"%.1f\" fill=\"#9ecae1\" stroke=\"black\"/>\n"
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\" stroke-width=\"2\"/>\n",
                  cx, y(c.max), cx, y(c.min), cx - 20, y(c.q3), std::max(0.5, y(c.q1) - y(c.q3)), cx - 20, y(c.median),
                  cx + 20, y(c.median));
    os << buf;
    std::string label;
    for (const auto& k : c.key) label += (label.empty() ? "" : "/") + k;
    os << "<text x=\"" << cx << "\" y=\"" << top + plot_h + 20 << "\" font-size=\"10\" text-anchor=\"middle\">"
       << xml_escape(label) << "</text>\n";
    os << "<text x=\"" << cx << "\" y=\"" << top + plot_h + 34 << "\" font-size=\"10\" text-anchor=\"middle\">n="
       << c.n << "</text>\n";
  }
  os << "</svg>\n";
}

void write_report(const std::vector<ResultsRow>& rows, const std::string& out_dir) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "no results to report");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());
  for (const auto& table : summarize_all(rows)) {
    std::ostringstream tsv, svg;
    write_summary(tsv, table);
    write_svg(svg, table);
    write_atomically((fs::path(out_dir) / ("summary_" + table.name + ".tsv")).string(), tsv.str());
    write_atomically((fs::path(out_dir) / (table.name + ".svg")).string(), svg.str());
  }
  std::ostringstream overall;
  overall << "metric\tn\tmean\treference\n";
  for (const char* m : {"accuracy", "fixations", "response_time", "head_movement"}) {
    const auto t = summarize(rows, m, {});
    overall << m << '\t' << t.cells[0].n << '\t' << format6(t.cells[0].mean) << '\t' << reference_note(m) << '\n';
  }
  write_atomically((fs::path(out_dir) / "overall.tsv").string(), overall.str());
  std::ostringstream learn;
  learn << "metric\tcomplexity\tn\tslope\tspearman\tp_value\n";
  for (const char* m : {"accuracy", "fixations", "head_movement"}) {
    try {
      for (const auto& tr : learning_effect(rows, m))
        learn << m << '\t' << to_string(tr.complexity) << '\t' << tr.n << '\t' << format6(tr.slope) << '\t'
              << format6(tr.spearman) << '\t' << format6(tr.p_value) << '\n';
    } catch (const Error& e) {
      learn << "# " << m << ": " << e.what() << '\n';
    }
  }
  write_atomically((fs::path(out_dir) / "learning.tsv").string(), learn.str());
}

int mine_directory(const std::string& trace_dir, const std::string& out_dir, double min_support) {
  std::error_code ec;
  if (!fs::is_directory(trace_dir, ec)) throw Error(ErrorCode::Io, "trace directory not found: " + trace_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(trace_dir))
    if (e.is_regular_file() && e.path().extension() == ".trace") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.size() < 2) throw Error(ErrorCode::Io, "need at least two .trace files in " + trace_dir);
  fs::create_directories(fs::path(out_dir) / "trial_graphs", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());

  std::vector<TrialGraph> graphs;
  for (const auto& f : files) {
    const Trace t = read_trace_file(f.string());
    graphs.push_back(build_trial_graph(t, detect_operations(t)));
    std::ostringstream dot, text;
    write_dot(dot, graphs.back(), f.stem().string());
    write_trial_graph(text, graphs.back());
    write_atomically((fs::path(out_dir) / "trial_graphs" / (f.stem().string() + ".dot")).string(), dot.str());
    write_atomically((fs::path(out_dir) / "trial_graphs" / (f.stem().string() + ".graph")).string(), text.str());
  }
  const auto mined = mine_method_graphs(graphs, min_support);
  std::ostringstream dot;
  for (std::size_t i = 0; i < mined.size(); ++i) write_dot(dot, mined[i], "mined" + std::to_string(i + 1));
  write_atomically((fs::path(out_dir) / "methods.dot").string(), dot.str());
  write_atomically((fs::path(out_dir) / "methods.lib").string(),
                   mined.empty() ? std::string("# no method reached the support threshold\n")
                                 : write_library_string(to_library(mined)));
  return static_cast<int>(files.size());
}

std::string resolve_out_dir(const std::string& requested) {
  const char* env = std::getenv("PESAO_OUT_DIR");
  return env && *env ? std::string(env) : requested;
}

}  // namespace pesao
