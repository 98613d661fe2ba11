#include "katzforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "katzforge/errors.hpp"
#include "katzforge/io.hpp"

namespace katzforge {
namespace {

std::vector<std::vector<int>> positive_successors(const AllocationProfile& profile) {
  const int n = profile.size();
  std::vector<std::vector<int>> succ(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (profile(i, j) > 0.0) succ[i].push_back(j);
  return succ;
}

// Iterative Tarjan; returns components in discovery order.
std::vector<std::vector<int>> tarjan(const std::vector<std::vector<int>>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;

  struct Frame {
    int node;
    std::size_t next;
  };
  std::vector<Frame> calls;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    calls.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!calls.empty()) {
      auto& frame = calls.back();
      const int v = frame.node;
      if (frame.next < succ[v].size()) {
        const int u = succ[v][frame.next++];
        if (index[u] == -1) {
          index[u] = low[u] = counter++;
          stack.push_back(u);
          on_stack[u] = 1;
          calls.push_back({u, 0});
        } else if (on_stack[u]) {
          low[v] = std::min(low[v], index[u]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int u;
        do {
          u = stack.back();
          stack.pop_back();
          on_stack[u] = 0;
          comp.push_back(u);
        } while (u != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
      calls.pop_back();
      if (!calls.empty()) {
        const int parent = calls.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return out;
}

std::string agent_label(int agent) { return std::to_string(agent + 1); }

std::string num(double x) { return format_double(x); }

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

CheckEntry make_entry(std::string name) {
  CheckEntry e;
  e.name = std::move(name);
  return e;
}

CheckEntry inapplicable(std::string name, std::string why) {
  CheckEntry e = make_entry(std::move(name));
  e.status = CheckStatus::inapplicable;
  e.detail = std::move(why);
  return e;
}

void fail(CheckEntry& e, std::string witness) {
  e.status = CheckStatus::fail;
  e.witnesses.push_back(std::move(witness));
}

Centralities centralities_of(const GameInstance& game, const AllocationProfile& profile) {
  if (auto problems = feasibility_violations(game, profile); !problems.empty()) {
    throw InfeasibleProfile("infeasible allocation: " + problems.front());
  }
  return katz_solve(profile);
}

}  // namespace

CondensationGraph scc_condensation(const AllocationProfile& profile) {
  const auto succ = positive_successors(profile);
  auto comps = tarjan(succ);
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  CondensationGraph graph;
  graph.component_of.assign(profile.size(), -1);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    for (int a : comps[k]) graph.component_of[a] = static_cast<int>(k);
    graph.components.push_back({std::move(comps[k]), true, std::nullopt, std::nullopt});
  }
  for (int i = 0; i < profile.size(); ++i) {
    for (int j : succ[i]) {
      const int from = graph.component_of[i], to = graph.component_of[j];
      if (from != to) graph.edges.emplace_back(from, to);
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()), graph.edges.end());
  for (const auto& [from, to] : graph.edges) graph.components[from].sink = false;
  return graph;
}

void annotate_condensation(CondensationGraph& graph, const GameInstance& game, const Centralities& c,
                           double centrality_tol, double budget_tol) {
  for (auto& comp : graph.components) {
    const int first = comp.members.front();
    bool same_c = true, same_b = true;
    for (int a : comp.members) {
      same_c = same_c && close(c(a), c(first), centrality_tol);
      same_b = same_b && close(game.budget(a), game.budget(first), budget_tol);
    }
    comp.alpha = same_c ? std::optional<double>(c(first)) : std::nullopt;
    comp.gamma = same_b ? std::optional<double>(game.budget(first)) : std::nullopt;
  }
}

std::string condensation_to_dot(const CondensationGraph& graph) {
  std::ostringstream out;
  out << "digraph condensation {\n  rankdir=LR;\n";
  for (std::size_t k = 0; k < graph.components.size(); ++k) {
    const auto& comp = graph.components[k];
    std::string agents = "{";
    for (std::size_t m = 0; m < comp.members.size(); ++m) {
      if (m) agents += ",";
      agents += agent_label(comp.members[m]);
    }
    agents += "}";
    out << "  scc" << k << " [label=\"SCC" << k << ": " << agents
        << ", alpha=" << (comp.alpha ? num(*comp.alpha) : std::string("non-uniform"))
        << ", gamma=" << (comp.gamma ? num(*comp.gamma) : std::string("non-uniform")) << "\", shape="
        << (comp.sink ? "doublecircle" : "circle") << "];\n";
  }
  for (const auto& [from, to] : graph.edges) out << "  scc" << from << " -> scc" << to << ";\n";
  out << "}\n";
  return out.str();
}

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::inapplicable:
      return "inapplicable";
  }
  return "unknown";
}

bool StructureReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckEntry& e) { return e.status == CheckStatus::fail; });
}

const CheckEntry* StructureReport::find(std::string_view name) const {
  for (const auto& e : checks)
    if (e.name == name) return &e;
  return nullptr;
}

CheckEntry check_complete_topology(const GameInstance& game, const AllocationProfile& profile,
                                   const AnalysisOptions& options) {
  const char* name = "complete-closed-form";
  if (!game.topology().is_complete()) return inapplicable(name, "underlying topology is not complete");
  const auto c = centralities_of(game, profile);
  const double bm = game.max_budget();
  const double budget_tol = options.tolerances.budget;
  CheckEntry e = make_entry(name);
  for (int i = 0; i < game.size(); ++i) {
    const double expected = game.budget(i) / (1.0 - bm);
    if (!close(c(i), expected, options.tol)) {
      fail(e, "agent " + agent_label(i) + ": c=" + num(c(i)) + " but B/(1-B_M)=" + num(expected));
    }
    if (!close(profile.row_sum(i), game.budget(i), budget_tol)) {
      fail(e, "agent " + agent_label(i) + ": allocates " + num(profile.row_sum(i)) + " of budget " +
                  num(game.budget(i)));
    }
    for (int j = 0; j < game.size(); ++j) {
      if (profile(i, j) > 0.0 && !close(game.budget(j), bm, budget_tol)) {
        fail(e, "edge (" + agent_label(i) + "," + agent_label(j) + ") targets budget " +
                    num(game.budget(j)) + " < B_M=" + num(bm));
      }
    }
  }
  e.detail = "B_M=" + num(bm);
  return e;
}

CheckEntry check_hierarchy(const GameInstance& game, const AllocationProfile& profile,
                           const AnalysisOptions& options) {
  const char* name = "hierarchy";
  if (!game.topology().has_all_self_loops()) return inapplicable(name, "some agent lacks a self-loop");
  const auto c = centralities_of(game, profile);
  CheckEntry e = make_entry(name);
  std::size_t edges = 0;
  for (int i = 0; i < game.size(); ++i) {
    for (int j = 0; j < game.size(); ++j) {
      if (!(profile(i, j) > 0.0)) continue;
      ++edges;
      if (c(i) > c(j) + options.tol) {
        fail(e, "edge (" + agent_label(i) + "," + agent_label(j) + "): c_" + agent_label(i) + "=" +
                    num(c(i)) + " > c_" + agent_label(j) + "=" + num(c(j)));
      }
    }
  }
  e.detail = std::to_string(edges) + " positive edges checked";
  return e;
}

CheckEntry check_scc_uniformity(const GameInstance& game, const AllocationProfile& profile,
                                const AnalysisOptions& options) {
  const char* name = "scc-uniformity";
  if (!game.topology().has_all_self_loops()) return inapplicable(name, "some agent lacks a self-loop");
  const auto c = centralities_of(game, profile);
  const auto graph = scc_condensation(profile);
  CheckEntry e = make_entry(name);
  for (std::size_t k = 0; k < graph.components.size(); ++k) {
    const auto& members = graph.components[k].members;
    const int first = members.front();
    for (int a : members) {
      if (!close(c(a), c(first), options.tol)) {
        fail(e, "SCC" + std::to_string(k) + ": c_" + agent_label(first) + "=" + num(c(first)) + " vs c_" +
                    agent_label(a) + "=" + num(c(a)));
      }
      if (!close(game.budget(a), game.budget(first), options.tolerances.budget)) {
        fail(e, "SCC" + std::to_string(k) + ": B_" + agent_label(first) + "=" + num(game.budget(first)) +
                    " vs B_" + agent_label(a) + "=" + num(game.budget(a)));
      }
    }
  }
  // Propagation from multi-agent components into their targets.
  for (const auto& [from, to] : graph.edges) {
    const auto& source = graph.components[from].members;
    if (source.size() < 2) continue;
    const double alpha = c(source.front());
    for (int a : graph.components[to].members) {
      if (!close(c(a), alpha, options.tol)) {
        fail(e, "SCC" + std::to_string(from) + " (alpha=" + num(alpha) + ") points into SCC" +
                    std::to_string(to) + " where c_" + agent_label(a) + "=" + num(c(a)));
      }
    }
  }
  e.detail = std::to_string(graph.components.size()) + " components";
  return e;
}

std::vector<std::vector<int>> simple_cycles(const AllocationProfile& profile, std::size_t max_length) {
  const auto succ = positive_successors(profile);
  const int n = profile.size();
  std::vector<std::vector<int>> cycles;
  std::vector<int> path;
  std::vector<char> on_path(n, 0);

  // Cycles are rooted at their smallest member; DFS only visits larger ones.
  auto extend = [&](auto& self, int start, int v) -> void {
    for (int u : succ[v]) {
      if (u == start) {
        cycles.push_back(path);
      } else if (u > start && !on_path[u] && path.size() < max_length) {
        path.push_back(u);
        on_path[u] = 1;
        self(self, start, u);
        on_path[u] = 0;
        path.pop_back();
      }
    }
  };
  if (max_length == 0) return cycles;
  for (int s = 0; s < n; ++s) {
    path.assign(1, s);
    on_path[s] = 1;
    extend(extend, s, s);
    on_path[s] = 0;
  }
  return cycles;
}

CheckEntry check_cycle_parity(const GameInstance& game, const AllocationProfile& profile,
                              const AnalysisOptions& options) {
  const char* name = "cycle-parity";
  if (!game.topology().is_symmetric()) return inapplicable(name, "underlying topology is not undirected");
  const auto c = centralities_of(game, profile);
  const auto cycles = simple_cycles(profile, options.max_cycle_length);
  CheckEntry e = make_entry(name);
  auto cycle_text = [](const std::vector<int>& cycle) {
    std::string s;
    for (int a : cycle) s += agent_label(a) + "->";
    return s + agent_label(cycle.front());
  };
  for (const auto& cycle : cycles) {
    const bool odd = cycle.size() % 2 == 1;
    for (std::size_t k = 1; k < cycle.size(); ++k) {
      // Odd cycles: compare with the first member. Even: with the member two back.
      const int ref = odd ? cycle.front() : cycle[k % 2];
      if (!odd && k < 2) continue;
      const int a = cycle[k];
      if (!close(c(a), c(ref), options.tol) ||
          !close(game.budget(a), game.budget(ref), options.tolerances.budget)) {
        fail(e, "cycle " + cycle_text(cycle) + ": agents " + agent_label(ref) + " and " + agent_label(a) +
                    " differ (c " + num(c(ref)) + " vs " + num(c(a)) + ", B " + num(game.budget(ref)) +
                    " vs " + num(game.budget(a)) + ")");
        break;
      }
    }
  }
  e.detail = std::to_string(cycles.size()) + " cycles up to length " + std::to_string(options.max_cycle_length);
  return e;
}

CheckEntry check_sink_dominance(const GameInstance& game, const AllocationProfile& profile,
                                const AnalysisOptions& options) {
  const char* name = "sink-dominance";
  if (!game.topology().has_all_self_loops()) return inapplicable(name, "some agent lacks a self-loop");
  const auto c = centralities_of(game, profile);
  const auto graph = scc_condensation(profile);
  const double top = c.maxCoeff();
  CheckEntry e = make_entry(name);
  bool found = false;
  for (const auto& comp : graph.components) {
    if (!comp.sink) continue;
    for (int a : comp.members) found = found || c(a) >= top - options.tol;
  }
  if (!found) fail(e, "max centrality " + num(top) + " not attained in any sink component");
  e.detail = "max centrality " + num(top);
  return e;
}

StructureReport analyze_structure(const GameInstance& game, const AllocationProfile& profile,
                                  const AnalysisOptions& options) {
  StructureReport report;
  report.checks.push_back(check_complete_topology(game, profile, options));
  report.checks.push_back(check_hierarchy(game, profile, options));
  report.checks.push_back(check_scc_uniformity(game, profile, options));
  report.checks.push_back(check_sink_dominance(game, profile, options));
  report.checks.push_back(check_cycle_parity(game, profile, options));
  return report;
}

}  // namespace katzforge
