#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pesao/common.hpp"
#include "pesao/types.hpp"

namespace pesao {

struct Param {
  std::string name;
  std::optional<std::string> value;  // nullopt = unbound ("name=?")
  friend bool operator==(const Param&, const Param&) = default;
};

struct ProgramNode {
  std::string id;
  bool choice = false;
  OperationKind kind = OperationKind::Answer;  // unused for choice points
  std::vector<Param> params;

  std::optional<std::string> param(std::string_view name) const;
  friend bool operator==(const ProgramNode&, const ProgramNode&) = default;
};

struct ProgramArc {
  int from = 0;
  int to = 0;
  double weight = 1.0;
  friend bool operator==(const ProgramArc&, const ProgramArc&) = default;
};

/// Directed operation graph with weighted choice points. A Method may carry
/// unbound parameters; a Script has every parameter bound.
struct CognitiveProgram {
  std::string name;
  double weight = 1.0;  // selection weight inside a library
  std::vector<ProgramNode> nodes;
  std::vector<ProgramArc> arcs;
  int entry = 0;
  std::vector<int> exits;

  bool is_script() const;
  int index_of(std::string_view id) const;  // -1 if absent
  std::vector<int> outgoing(int node) const;  // arc indices
  friend bool operator==(const CognitiveProgram&, const CognitiveProgram&) = default;
};

/// Throws Error(Configuration) when a node's outgoing weights do not sum to
/// 1 within 1e-9, when a choice point has no arcs, or when no exit is
/// reachable from the entry.
void validate(const CognitiveProgram& p);

using Bindings = std::map<std::string, std::string>;

/// Binds every unbound parameter from "<node>.<param>" or "<param>" keys.
/// Throws Error(UnboundParameter) when one stays unbound.
CognitiveProgram instantiate(const CognitiveProgram& method, const Bindings& bindings);

/// Index sampled proportionally to the weights. Throws Error(Configuration)
/// for empty, negative or all-zero weights.
std::size_t sample_choice(std::span<const double> weights, Rng& rng);

struct StrategyLibrary {
  std::vector<CognitiveProgram> methods;
  double confirm = 0.5;  // probability of repeating the concluding strategy

  friend bool operator==(const StrategyLibrary&, const StrategyLibrary&) = default;
};

void validate(const StrategyLibrary& lib);

/// Grammar, one statement per line, '#' starts a comment:
///   confirm <p>
///   method <name> <weight>
///   node <id> <OperationKind> [key=value | key=?]...
///   choice <id>
///   arc <from> <to> <weight>
///   entry <id>
///   exit <id>
///   end
StrategyLibrary parse_library(std::istream& is);
StrategyLibrary parse_library_string(const std::string& text);
StrategyLibrary read_library_file(const std::string& path);
void write_library(std::ostream& os, const StrategyLibrary& lib);
std::string write_library_string(const StrategyLibrary& lib);

/// Shipped library: one method per strategy family with uniform placeholder
/// weights at every choice point.
StrategyLibrary default_library();
const char* default_library_text();

}  // namespace pesao
