#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "katzforge/centrality.hpp"
#include "katzforge/instance.hpp"
#include "katzforge/tolerances.hpp"

namespace katzforge {

struct Component {
  std::vector<int> members;  // ascending, 0-based
  bool sink = false;         // no edge to another component
  /// Common centrality / budget when the members agree; unset otherwise or
  /// before annotation.
  std::optional<double> alpha;
  std::optional<double> gamma;
};

/// Strongly connected components of the positive-weight digraph of w and
/// the acyclic quotient graph over them. Components are ordered by their
/// smallest member.
struct CondensationGraph {
  std::vector<Component> components;
  std::vector<std::pair<int, int>> edges;  // component indices, sorted, unique
  std::vector<int> component_of;           // agent -> component index
};

CondensationGraph scc_condensation(const AllocationProfile& profile);

/// Fills alpha/gamma where members share centrality (within `centrality_tol`)
/// and budget (within `budget_tol`).
void annotate_condensation(CondensationGraph& graph, const GameInstance& game, const Centralities& c,
                           double centrality_tol, double budget_tol);

/// DOT export: one node per component labelled "SCC{k}: agents, alpha, gamma";
/// sinks are double circles.
std::string condensation_to_dot(const CondensationGraph& graph);

enum class CheckStatus { pass, fail, inapplicable };
const char* to_string(CheckStatus status);

struct CheckEntry {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string detail;
  std::vector<std::string> witnesses;  // nonempty on failure
};

struct StructureReport {
  std::vector<CheckEntry> checks;

  /// No check failed (inapplicable entries do not count as failures).
  bool passed() const;
  const CheckEntry* find(std::string_view name) const;
};

struct AnalysisOptions {
  Tolerances tolerances;
  /// Centrality equality tolerance (game-level).
  double tol = kDefaultTolerances.equality;
  std::size_t max_cycle_length = 12;
};

/// Complete topology: c_i = B_i / (1 - B_M), full budget use, and every
/// positive edge targets a maximum-budget agent.
CheckEntry check_complete_topology(const GameInstance& game, const AllocationProfile& profile,
                                   const AnalysisOptions& options = {});

/// Self-loop topology: every positive edge (i, j) has c_i <= c_j.
CheckEntry check_hierarchy(const GameInstance& game, const AllocationProfile& profile,
                           const AnalysisOptions& options = {});

/// Self-loop topology: members of each SCC share budget and centrality, and
/// a multi-agent SCC passes its centrality to any SCC it points into.
CheckEntry check_scc_uniformity(const GameInstance& game, const AllocationProfile& profile,
                                const AnalysisOptions& options = {});

/// Undirected topology: agents on an odd cycle share budget and centrality;
/// on an even cycle alternate agents do.
CheckEntry check_cycle_parity(const GameInstance& game, const AllocationProfile& profile,
                              const AnalysisOptions& options = {});

/// Self-loop topology: the largest centrality is attained in a sink SCC.
CheckEntry check_sink_dominance(const GameInstance& game, const AllocationProfile& profile,
                                const AnalysisOptions& options = {});

/// Runs every check; those whose hypotheses do not hold are inapplicable.
StructureReport analyze_structure(const GameInstance& game, const AllocationProfile& profile,
                                  const AnalysisOptions& options = {});

/// Simple directed cycles of the positive-weight digraph with at most
/// `max_length` agents, each listed once starting from its smallest member.
/// Self-loops count as cycles of length 1.
std::vector<std::vector<int>> simple_cycles(const AllocationProfile& profile, std::size_t max_length);

}  // namespace katzforge
