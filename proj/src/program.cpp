#include "pesao/program.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace pesao {

std::optional<std::string> ProgramNode::param(std::string_view n) const {
  for (const auto& p : params)
    if (p.name == n) return p.value;
  return std::nullopt;
}

bool CognitiveProgram::is_script() const {
  for (const auto& n : nodes)
    for (const auto& p : n.params)
      if (!p.value) return false;
  return true;
}

int CognitiveProgram::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<int> CognitiveProgram::outgoing(int node) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (arcs[i].from == node) out.push_back(static_cast<int>(i));
  return out;
}

void validate(const CognitiveProgram& p) {
  auto fail = [&](const std::string& m) { throw Error(ErrorCode::Configuration, "method " + p.name + ": " + m); };
  if (p.nodes.empty()) fail("no nodes");
  const int n = static_cast<int>(p.nodes.size());
  if (p.entry < 0 || p.entry >= n) fail("entry out of range");
  if (p.exits.empty()) fail("no exit");
  for (const auto& a : p.arcs) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n) fail("arc endpoint out of range");
    if (!(a.weight >= 0.0 && a.weight <= 1.0)) fail("arc weight outside [0,1]");
  }
  for (int i = 0; i < n; ++i) {
    const auto out = p.outgoing(i);
    if (p.nodes[static_cast<std::size_t>(i)].choice && out.empty()) fail("choice point " + p.nodes[static_cast<std::size_t>(i)].id + " has no arcs");
    if (out.empty()) continue;
    double sum = 0.0;
    for (int a : out) sum += p.arcs[static_cast<std::size_t>(a)].weight;
    if (std::abs(sum - 1.0) > 1e-9) fail("weights out of " + p.nodes[static_cast<std::size_t>(i)].id + " sum to " + format6(sum));
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{p.entry};
  seen[static_cast<std::size_t>(p.entry)] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int a : p.outgoing(v)) {
      const int w = p.arcs[static_cast<std::size_t>(a)].to;
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  bool reach = false;
  for (int e : p.exits) {
    if (e < 0 || e >= n) fail("exit out of range");
    reach = reach || seen[static_cast<std::size_t>(e)];
  }
  if (!reach) fail("no exit reachable from entry");
}

CognitiveProgram instantiate(const CognitiveProgram& method, const Bindings& bindings) {
  CognitiveProgram script = method;
  for (auto& node : script.nodes)
    for (auto& p : node.params) {
      if (p.value) continue;
      if (auto it = bindings.find(node.id + "." + p.name); it != bindings.end())
        p.value = it->second;
      else if (auto jt = bindings.find(p.name); jt != bindings.end())
        p.value = jt->second;
      else
        throw Error(ErrorCode::UnboundParameter, "parameter " + node.id + "." + p.name + " has no binding");
    }
  return script;
}

std::size_t sample_choice(std::span<const double> weights, Rng& rng) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::Configuration, "negative choice weight");
    sum += w;
  }
  if (weights.empty() || !(sum > 0.0)) throw Error(ErrorCode::Configuration, "degenerate choice weights");
  if (weights.size() == 1) return 0;
  const double u = uniform01(rng) * sum;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return 0;
}

void validate(const StrategyLibrary& lib) {
  if (lib.methods.empty()) throw Error(ErrorCode::Configuration, "library has no methods");
  if (!(lib.confirm >= 0.0 && lib.confirm <= 1.0)) throw Error(ErrorCode::Configuration, "confirm must be in [0,1]");
  double sum = 0.0;
  for (const auto& m : lib.methods) {
    validate(m);
    if (!(m.weight >= 0.0)) throw Error(ErrorCode::Configuration, "negative method weight");
    sum += m.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::Configuration, "method weights sum to " + format6(sum));
}

namespace {

double parse_weight(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) throw ParseError(line, "bad number '" + s + "'");
  return v;
}

}  // namespace

StrategyLibrary parse_library(std::istream& is) {
  StrategyLibrary lib;
  std::optional<CognitiveProgram> cur;
  std::optional<std::string> entry;
  std::vector<std::string> exits;
  std::vector<std::tuple<std::string, std::string, double, std::size_t>> arcs;
  std::string line;
  std::size_t n = 0;

  auto need = [&](bool in_method, const std::string& what) {
    if (in_method != cur.has_value())
      throw ParseError(n, what + (in_method ? " outside a method" : " inside a method"));
  };
  auto node_index = [&](const std::string& id, std::size_t ln) {
    const int i = cur->index_of(id);
    if (i < 0) throw ParseError(ln, "unknown node '" + id + "'");
    return i;
  };

  while (std::getline(is, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> f;
    for (std::string t; ls >> t;) f.push_back(t);
    if (f.empty()) continue;
    const std::string& k = f[0];
    if (k == "confirm") {
      need(false, "confirm");
      if (f.size() != 2) throw ParseError(n, "confirm takes one value");
      lib.confirm = parse_weight(f[1], n);
    } else if (k == "method") {
      need(false, "method");
      if (f.size() != 3) throw ParseError(n, "method takes a name and a weight");
      cur.emplace();
      cur->name = f[1];
      cur->weight = parse_weight(f[2], n);
      entry.reset();
      exits.clear();
      arcs.clear();
    } else if (k == "node" || k == "choice") {
      need(true, k);
      ProgramNode node;
      if (f.size() < 2) throw ParseError(n, k + " needs an id");
      node.id = f[1];
      if (cur->index_of(node.id) >= 0) throw ParseError(n, "duplicate node '" + node.id + "'");
      if (k == "choice") {
        if (f.size() != 2) throw ParseError(n, "choice takes only an id");
        node.choice = true;
      } else {
        if (f.size() < 3) throw ParseError(n, "node needs an operation kind");
        auto kind = parse_operation_kind(f[2]);
        if (!kind) throw ParseError(n, "unknown operation '" + f[2] + "'");
        node.kind = *kind;
        for (std::size_t i = 3; i < f.size(); ++i) {
          const auto eq = f[i].find('=');
          if (eq == std::string::npos || eq == 0 || eq + 1 == f[i].size())
            throw ParseError(n, "parameter must be key=value or key=?");
          Param p{f[i].substr(0, eq), std::nullopt};
          const std::string v = f[i].substr(eq + 1);
          if (v != "?") p.value = v;
          node.params.push_back(p);
        }
      }
      cur->nodes.push_back(node);
    } else if (k == "arc") {
      need(true, "arc");
      if (f.size() != 4) throw ParseError(n, "arc takes from, to and weight");
      arcs.emplace_back(f[1], f[2], parse_weight(f[3], n), n);
    } else if (k == "entry") {
      need(true, "entry");
      if (f.size() != 2 || entry) throw ParseError(n, "one entry with one id");
      entry = f[1];
    } else if (k == "exit") {
      need(true, "exit");
      if (f.size() != 2) throw ParseError(n, "exit takes one id");
      exits.push_back(f[1]);
    } else if (k == "end") {
      need(true, "end");
      for (const auto& [from, to, w, ln] : arcs) cur->arcs.push_back({node_index(from, ln), node_index(to, ln), w});
      if (!entry) throw ParseError(n, "method " + cur->name + " has no entry");
      cur->entry = node_index(*entry, n);
      for (const auto& e : exits) cur->exits.push_back(node_index(e, n));
      lib.methods.push_back(std::move(*cur));
      cur.reset();
    } else {
      throw ParseError(n, "unknown statement '" + k + "'");
    }
  }
  if (cur) throw ParseError(n + 1, "method " + cur->name + " not terminated by end");
  validate(lib);
  return lib;
}

StrategyLibrary parse_library_string(const std::string& text) {
  std::istringstream is(text);
  return parse_library(is);
}

StrategyLibrary read_library_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open strategy library " + path);
  return parse_library(in);
}

void write_library(std::ostream& os, const StrategyLibrary& lib) {
  os << "confirm " << format6(lib.confirm) << '\n';
  for (const auto& m : lib.methods) {
    os << "\nmethod " << m.name << ' ' << format6(m.weight) << '\n';
    for (const auto& node : m.nodes) {
      if (node.choice) {
        os << "choice " << node.id << '\n';
        continue;
      }
      os << "node " << node.id << ' ' << to_string(node.kind);
      for (const auto& p : node.params) os << ' ' << p.name << '=' << (p.value ? *p.value : "?");
      os << '\n';
    }
    for (const auto& a : m.arcs)
      os << "arc " << m.nodes[static_cast<std::size_t>(a.from)].id << ' ' << m.nodes[static_cast<std::size_t>(a.to)].id
         << ' ' << format6(a.weight) << '\n';
    os << "entry " << m.nodes[static_cast<std::size_t>(m.entry)].id << '\n';
    for (int e : m.exits) os << "exit " << m.nodes[static_cast<std::size_t>(e)].id << '\n';
    os << "end\n";
  }
}

std::string write_library_string(const StrategyLibrary& lib) {
  std::ostringstream os;
  write_library(os, lib);
  return os.str();
}

const char* default_library_text() {
  return R"(# Default strategy library. Weights are uniform placeholders.
confirm 0.5

method divide 0.2
node d DivideAndConquer
entry d
exit d
end

method gist 0.2
node g GlobalGist coverage=?
node d DivideAndConquer
arc g d 1
entry g
exit d
end

method coarse 0.2
node c CoarseToFine part=?
choice k
node v AlternatingView part=? reps=2
node f AlternatingFixation part=? reps=2
arc c k 1
arc k v 0.5
arc k f 0.5
entry c
exit v
exit f
end

method altfix 0.2
node f AlternatingFixation part=? reps=2
entry f
exit f
end

method altview 0.2
node v AlternatingView part=? reps=2
entry v
exit v
end
)";
}

StrategyLibrary default_library() { return parse_library_string(default_library_text()); }

}  // namespace pesao
