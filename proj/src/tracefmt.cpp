#include "pesao/tracefmt.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pesao {

std::string_view to_string(MotionKind k) { return k == MotionKind::Walk ? "walk" : "head_turn"; }

void quantize(FixationRecord& r) {
  r.t_start = quantize6(r.t_start);
  r.duration_ms = quantize6(r.duration_ms);
  for (double* v : {&r.head.position.x, &r.head.position.y, &r.head.position.z, &r.head.yaw, &r.head.pitch,
                    &r.head.roll, &r.gaze.x, &r.gaze.y, &r.gaze.z})
    *v = quantize6(*v);
}

void quantize(Trace& t) {
  for (auto& r : t.records) quantize(r);
  for (auto& m : t.motions) {
    m.t_start = quantize6(m.t_start);
    m.path_m = quantize6(m.path_m);
  }
  for (auto& n : t.notes) n.t = quantize6(n.t);
}

void validate(const Trace& t) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::Validation, m); };
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    const auto& r = t.records[i];
    if (!(r.duration_ms > 0.0)) fail("record " + std::to_string(i + 1) + ": duration must be positive");
    if (i > 0 && r.t_start < t.records[i - 1].t_start)
      fail("record " + std::to_string(i + 1) + ": start time decreases");
    if (r.sector.has_value() != r.on_object())
      fail("record " + std::to_string(i + 1) + ": sector must be present exactly for object fixations");
    if (r.sector && (*r.sector < 0 || *r.sector > 7)) fail("record " + std::to_string(i + 1) + ": sector out of range");
    if (r.element && !r.on_object()) fail("record " + std::to_string(i + 1) + ": element on environment fixation");
  }
  for (std::size_t i = 1; i < t.motions.size(); ++i)
    if (t.motions[i].t_start < t.motions[i - 1].t_start) fail("motion start time decreases");
  for (const auto& m : t.motions)
    if (m.path_m < 0.0) fail("negative motion path");
  for (std::size_t i = 1; i < t.notes.size(); ++i)
    if (t.notes[i].t < t.notes[i - 1].t) fail("note time decreases");
  for (const auto& n : t.notes)
    if (n.note.empty() || n.note.find_first_of(" \t\n") != std::string::npos) fail("note must be one token");
}

void write_trace(std::ostream& os, const Trace& t) {
  validate(t);
  os << "# " << kTraceVersion << '\n';
  os << "# " << to_line(t.meta.config) << '\n';
  os << "# engine " << t.meta.engine_version << '\n';
  os << "# seed " << t.meta.seed << '\n';
  for (const auto& r : t.records) {
    os << "F " << format6(r.t_start) << ' ' << format6(r.duration_ms);
    for (double v : {r.head.position.x, r.head.position.y, r.head.position.z, r.head.yaw, r.head.pitch, r.head.roll,
                     r.gaze.x, r.gaze.y, r.gaze.z})
      os << ' ' << format6(v);
    os << ' ' << to_string(r.target) << ' ';
    if (r.element)
      os << 'p' << r.element->part << ".b" << r.element->block << ".f" << r.element->face;
    else
      os << '-';
    os << ' ';
    if (r.sector)
      os << *r.sector;
    else
      os << '-';
    os << ' ' << (r.annotation ? to_string(*r.annotation) : std::string_view("-")) << '\n';
  }
  for (const auto& m : t.motions) os << "M " << format6(m.t_start) << ' ' << to_string(m.kind) << ' ' << format6(m.path_m) << '\n';
  for (const auto& n : t.notes) os << "N " << format6(n.t) << ' ' << n.note << '\n';
  if (t.answer) os << "answer " << to_string(*t.answer) << ' ' << (t.correct ? 1 : 0) << '\n';
  os << "end\n";
  if (!os) throw Error(ErrorCode::Io, "failed writing trace");
}

std::string write_trace(const Trace& t) {
  std::ostringstream os;
  write_trace(os, t);
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double num(const std::string& s, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) throw ParseError(line, "bad number '" + s + "'");
  return v;
}

long long integer(const std::string& s, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno == ERANGE) throw ParseError(line, "bad integer '" + s + "'");
  return v;
}

ElementRef parse_element(const std::string& s, std::size_t line) {
  ElementRef e;
  char tail = 0;
  if (std::sscanf(s.c_str(), "p%d.b%d.f%d%c", &e.part, &e.block, &e.face, &tail) != 3 || e.face < 0 || e.face > 5 ||
      e.part < 0 || e.block < 0)
    throw ParseError(line, "bad element '" + s + "'");
  return e;
}

}  // namespace

Trace read_trace(std::istream& is) {
  Trace t;
  std::string line;
  std::size_t n = 0;
  int header = 0;
  bool ended = false;
  while (std::getline(is, line)) {
    ++n;
    if (ended) {
      if (!split(line).empty()) throw ParseError(n, "content after end");
      continue;
    }
    if (line.rfind('#', 0) == 0) {
      const std::string body = line.size() > 2 ? line.substr(2) : "";
      switch (header) {
        case 0:
          if (body != kTraceVersion) throw ParseError(n, "unsupported trace version '" + body + "'");
          break;
        case 1:
          try {
            t.meta.config = parse_trial_line(body);
          } catch (const Error& e) {
            throw ParseError(n, e.what());
          }
          break;
        case 2:
          if (body.rfind("engine ", 0) != 0) throw ParseError(n, "expected engine header");
          t.meta.engine_version = body.substr(7);
          break;
        case 3: {
          const auto f = split(body);
          if (f.size() != 2 || f[0] != "seed") throw ParseError(n, "expected seed header");
          t.meta.seed = std::strtoull(f[1].c_str(), nullptr, 10);
          break;
        }
        default:
          throw ParseError(n, "unexpected header line");
      }
      ++header;
      continue;
    }
    if (header < 4) throw ParseError(n, "incomplete header");
    const auto f = split(line);
    if (f.empty()) continue;
    if (f[0] == "F") {
      if (f.size() != 16) throw ParseError(n, "fixation line needs 16 fields");
      FixationRecord r;
      r.t_start = num(f[1], n);
      r.duration_ms = num(f[2], n);
      r.head.position = {num(f[3], n), num(f[4], n), num(f[5], n)};
      r.head.yaw = num(f[6], n);
      r.head.pitch = num(f[7], n);
      r.head.roll = num(f[8], n);
      r.gaze = {num(f[9], n), num(f[10], n), num(f[11], n)};
      auto tg = parse_target(f[12]);
      if (!tg) throw ParseError(n, "bad target '" + f[12] + "'");
      r.target = *tg;
      if (f[13] != "-") r.element = parse_element(f[13], n);
      if (f[14] != "-") r.sector = static_cast<int>(integer(f[14], n));
      if (f[15] != "-") {
        auto k = parse_operation_kind(f[15]);
        if (!k) throw ParseError(n, "unknown operation '" + f[15] + "'");
        r.annotation = *k;
      }
      t.records.push_back(r);
    } else if (f[0] == "M") {
      if (f.size() != 4) throw ParseError(n, "motion line needs 4 fields");
      MotionRecord m;
      m.t_start = num(f[1], n);
      if (f[2] == "walk")
        m.kind = MotionKind::Walk;
      else if (f[2] == "head_turn")
        m.kind = MotionKind::HeadTurn;
      else
        throw ParseError(n, "bad motion kind '" + f[2] + "'");
      m.path_m = num(f[3], n);
      t.motions.push_back(m);
    } else if (f[0] == "N") {
      if (f.size() != 3) throw ParseError(n, "note line needs 3 fields");
      t.notes.push_back({num(f[1], n), f[2]});
    } else if (f[0] == "answer") {
      if (f.size() != 3 || t.answer) throw ParseError(n, "bad answer line");
      auto g = parse_ground_truth(f[1]);
      if (!g || (f[2] != "0" && f[2] != "1")) throw ParseError(n, "bad answer line");
      t.answer = *g;
      t.correct = f[2] == "1";
    } else if (f[0] == "end" && f.size() == 1) {
      ended = true;
    } else {
      throw ParseError(n, "unrecognized line");
    }
  }
  if (!ended) throw ParseError(n + 1, "truncated trace: missing end line");
  validate(t);
  return t;
}

Trace read_trace_string(const std::string& text) {
  std::istringstream is(text);
  return read_trace(is);
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open trace " + path);
  return read_trace(in);
}

void write_trace_file(const std::string& path, const Trace& t) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write trace " + path);
  write_trace(out, t);
}

std::optional<std::size_t> response_clock_zero(const Trace& t) {
  for (std::size_t i = 0; i < t.records.size(); ++i)
    if (t.records[i].on_object()) return i;
  return std::nullopt;
}

TraceMetrics trace_metrics(const Trace& t) {
  if (!t.complete()) throw Error(ErrorCode::Incomplete, "trace has no answer");
  const auto zero = response_clock_zero(t);
  if (!zero) throw Error(ErrorCode::Incomplete, "trace never fixates a target");
  TraceMetrics m;
  for (const auto& r : t.records)
    if (r.on_object()) ++m.fixation_count;
  for (const auto& mo : t.motions) m.head_path_m += mo.path_m;
  double last_end = 0.0;
  for (const auto& r : t.records) last_end = std::max(last_end, r.t_end());
  m.response_time_s = last_end - t.records[*zero].t_start;
  return m;
}

}  // namespace pesao
