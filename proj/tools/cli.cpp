#include "cli.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "katzforge/errors.hpp"
#include "katzforge/io.hpp"

namespace katzforge::cli {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("range '" + text + "' must look like lo:hi");
  auto number = [&](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument("range '" + text + "' has a malformed bound");
    }
    return v;
  };
  return {number(std::string_view(text).substr(0, colon)), number(std::string_view(text).substr(colon + 1))};
}

Scheduler parse_scheduler(const std::string& choice, std::uint64_t seed, int n) {
  if (choice == "rr" || choice == "round-robin") return Scheduler::round_robin();
  if (choice == "random" || choice == "uniform-random") return Scheduler::uniform_random(seed);
  if (choice.rfind("seq:", 0) == 0) {
    std::vector<int> agents;
    std::string_view rest = std::string_view(choice).substr(4);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto token = rest.substr(0, comma);
      int agent = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), agent);
      if (ec != std::errc() || ptr != token.data() + token.size() || agent < 1 || agent > n) {
        throw std::invalid_argument("scheduler sequence entry '" + std::string(token) + "' is not an agent 1.." +
                                    std::to_string(n));
      }
      agents.push_back(agent - 1);
      rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
    }
    return Scheduler::explicit_sequence(std::move(agents));
  }
  throw std::invalid_argument("unknown scheduler '" + choice + "' (expected rr, random or seq:i,j,...)");
}

AllocationProfile initial_profile(const std::string& choice, const GameInstance& game, std::uint64_t seed) {
  if (choice == "zero") return AllocationProfile::zero(game.size());
  if (choice == "random") return generate_random_profile(game, seed);
  if (choice.rfind("file:", 0) == 0) return parse_allocation(read_text_file(choice.substr(5)), game.size());
  throw std::invalid_argument("unknown initial profile '" + choice + "' (expected zero, random or file:<path>)");
}

// Loads an allocation file; infeasible allocations are reported by the caller.
AllocationProfile load_allocation(const std::string& path, const GameInstance& game) {
  return parse_allocation(read_text_file(path), game.size());
}

struct Sink {
  std::ostream& out;
  void emit(const std::string& path, const std::string& text) const {
    if (path.empty() || path == "-") {
      out << text;
    } else {
      write_text_file(path, text);
    }
  }
};

// ---------------------------------------------------------------- gen

struct GenOptions {
  int n = 0;
  double density = 0.5;
  bool self_loops = false;
  bool undirected = false;
  std::string budgets = "0.1:0.9";
  int budget_levels = 0;
  std::uint64_t seed = 0;
  std::string name;
  std::string out;
};

int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  const auto [lo, hi] = parse_range(o.budgets);
  RandomInstanceParams params;
  params.n = o.n;
  params.edge_density = o.density;
  params.self_loops = o.self_loops;
  params.symmetric = o.undirected;
  params.budget_min = lo;
  params.budget_max = hi;
  params.budget_levels = o.budget_levels;
  params.seed = o.seed;
  auto generated = generate_random_instance(params);
  GameInstance game(generated.topology(), std::vector<double>(generated.budgets().begin(), generated.budgets().end()),
                    o.name);

  auto meta = metadata(&game, o.seed, kDefaultTolerances.equality);
  meta["generator"] = {{"n", o.n},
                       {"density", o.density},
                       {"self_loops", o.self_loops},
                       {"undirected", o.undirected},
                       {"budgets", o.budgets},
                       {"budget_levels", o.budget_levels}};
  Sink{out}.emit(o.out, attach_meta(serialize_instance(game), meta));

  const auto [bmin, bmax] = std::minmax_element(game.budgets().begin(), game.budgets().end());
  std::ostream& summary = (o.out.empty() || o.out == "-") ? err : out;
  summary << "generated n=" << game.size() << " |E|=" << game.topology().edge_count() << " B in ["
          << format_double(*bmin) << ", " << format_double(*bmax) << "]\n";
  return kSuccess;
}

// -------------------------------------------------------- equilibrium

struct EquilibriumOptions {
  std::string instance;
  std::optional<double> tol;
  std::string out;
};

int cmd_equilibrium(const EquilibriumOptions& o, std::ostream& out) {
  const double tol = resolve_tolerance(o.tol);
  const auto game = parse_instance(read_text_file(o.instance));
  const auto cert = equilibrium_centralities(game, tol);
  auto doc = to_json(cert);
  doc["meta"] = metadata(&game, std::nullopt, tol);
  Sink{out}.emit(o.out, doc.dump(2) + "\n");
  return kSuccess;
}

// ---------------------------------------------------------------- run

struct RunOptions {
  std::string instance;
  std::string mode = "standard";
  std::string scheduler = "rr";
  std::uint64_t seed = 0;
  std::string seeds;  // batch range a:b
  int jobs = 1;
  std::string w0 = "zero";
  std::optional<std::size_t> max_steps;
  std::optional<double> tol;
  bool no_lazy = false;
  bool full_trace = false;
  std::string out;
};

int run_single(const GameInstance& game, const RunOptions& o, std::uint64_t seed, double tol,
               const fs::path& csv_path) {
  BrdConfig config;
  config.scheduler = parse_scheduler(o.scheduler, seed, game.size());
  config.max_steps = o.max_steps;
  config.tol = tol;
  config.lazy = !o.no_lazy;
  if (o.mode == "standard") {
    config.mode = BrdMode::standard;
  } else if (o.mode == "modified") {
    config.mode = BrdMode::modified;
  } else {
    throw std::invalid_argument("unknown mode '" + o.mode + "' (expected standard or modified)");
  }
  const auto w0 = initial_profile(o.w0, game, seed);
  if (auto problems = feasibility_violations(game, w0); !problems.empty()) {
    throw InfeasibleProfile("initial profile is infeasible: " + problems.front());
  }
  const auto trace = run_dynamics(game, w0, config);

  fs::path stem = csv_path;
  stem.replace_extension();
  const auto meta = metadata(&game, seed, tol);
  write_text_file(csv_path, trace_to_csv(trace));

  ordered_json summary;
  summary["status"] = to_string(trace.status);
  summary["mode"] = to_string(trace.mode);
  summary["scheduler"] = trace.scheduler.describe();
  summary["lazy"] = config.lazy;
  summary["initial_profile"] = o.w0;
  summary["total_steps"] = trace.total_steps;
  summary["rewrites"] = trace.rewrites;
  summary["residual"] = trace.terminal_residual();
  summary["centralities"] = vector_json(trace.terminal_centralities());
  summary["trace_csv"] = csv_path.filename().string();
  summary["meta"] = meta;
  write_text_file(stem.string() + ".summary.json", summary.dump(2) + "\n");
  write_text_file(stem.string() + ".terminal.json", attach_meta(serialize_allocation(trace.terminal), meta));

  if (o.full_trace) {
    ordered_json rows = ordered_json::array();
    for (const auto& s : trace.steps) {
      ordered_json r;
      r["step"] = s.step;
      r["agent"] = s.agent + 1;
      r["rewritten"] = s.rewritten;
      r["row"] = s.agent < 0 ? ordered_json(nullptr) : vector_json(s.row);
      rows.push_back(std::move(r));
    }
    ordered_json doc;
    doc["initial"] = ordered_json::parse(serialize_allocation(w0))["weights"];
    doc["steps"] = std::move(rows);
    doc["meta"] = meta;
    write_text_file(stem.string() + ".allocations.json", doc.dump(2) + "\n");
  }
  return trace.status == BrdStatus::converged ? kSuccess : kStepLimit;
}

int cmd_run(const RunOptions& o, std::ostream& out) {
  const double tol = resolve_tolerance(o.tol);
  const auto game = parse_instance(read_text_file(o.instance));
  if (o.seeds.empty()) {
    const int code = run_single(game, o, o.seed, tol, o.out);
    out << "run " << (code == kSuccess ? "converged" : "hit the step limit") << "; trace written to " << o.out
        << "\n";
    return code;
  }

  const auto [first, last] = parse_range(o.seeds);
  if (first < 0 || last < first) throw std::invalid_argument("seed range must be ascending and nonnegative");
  std::vector<std::uint64_t> seeds;
  for (auto s = static_cast<std::uint64_t>(first); s <= static_cast<std::uint64_t>(last); ++s) seeds.push_back(s);

  fs::path base(o.out);
  const auto ext = base.extension().string();
  base.replace_extension();
  std::vector<int> codes(seeds.size(), kSuccess);
  std::vector<std::string> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < seeds.size();) {
      try {
        codes[k] = run_single(game, o, seeds[k], tol, base.string() + ".seed" + std::to_string(seeds[k]) + ext);
      } catch (const InfeasibleProfile& e) {
        codes[k] = kInfeasibleInput;
        errors[k] = e.what();
      } catch (const std::exception& e) {
        codes[k] = kUsageError;
        errors[k] = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(o.jobs, static_cast<int>(seeds.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kSuccess;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    out << "seed " << seeds[k] << ": "
        << (codes[k] == kSuccess ? "converged" : codes[k] == kStepLimit ? "step-limit" : "error: " + errors[k])
        << "\n";
    if (codes[k] == kUsageError || codes[k] == kInfeasibleInput) return codes[k];
    code = std::max(code, codes[k]);
  }
  return code;
}

// ------------------------------------------------------ verify/analyze

struct CheckOptions {
  std::string instance;
  std::string allocation;
  std::optional<double> tol;
  std::string out;
  std::string dot;
  std::size_t max_cycle_length = 12;
};

int report_infeasible(const GameInstance& game, const std::vector<std::string>& problems, double tol,
                      const CheckOptions& o, std::ostream& out) {
  ordered_json doc;
  doc["verdict"] = "infeasible";
  doc["violations"] = problems;
  doc["meta"] = metadata(&game, std::nullopt, tol);
  Sink{out}.emit(o.out, doc.dump(2) + "\n");
  return kInfeasibleInput;
}

int cmd_verify(const CheckOptions& o, std::ostream& out) {
  const double tol = resolve_tolerance(o.tol);
  const auto game = parse_instance(read_text_file(o.instance));
  const auto w = load_allocation(o.allocation, game);
  if (auto problems = feasibility_violations(game, w); !problems.empty()) {
    return report_infeasible(game, problems, tol, o, out);
  }
  const auto verdict = is_nash(game, w, tol);
  auto doc = to_json(verdict);
  doc["meta"] = metadata(&game, std::nullopt, tol);
  Sink{out}.emit(o.out, doc.dump(2) + "\n");
  if (!o.out.empty() && o.out != "-") {
    out << "nash=" << (verdict.is_nash ? "true" : "false") << " residual=" << format_double17(verdict.residual)
        << "\n";
  }
  return kSuccess;
}

int cmd_analyze(const CheckOptions& o, std::ostream& out) {
  const double tol = resolve_tolerance(o.tol);
  const auto game = parse_instance(read_text_file(o.instance));
  const auto w = load_allocation(o.allocation, game);
  if (auto problems = feasibility_violations(game, w); !problems.empty()) {
    return report_infeasible(game, problems, tol, o, out);
  }
  AnalysisOptions options;
  options.tol = tol;
  options.max_cycle_length = o.max_cycle_length;
  const auto verdict = is_nash(game, w, tol);
  const auto report = analyze_structure(game, w, options);
  auto graph = scc_condensation(w);
  annotate_condensation(graph, game, verdict.centralities, tol, options.tolerances.budget);

  ordered_json doc;
  doc["nash"] = verdict.is_nash;
  doc["residual"] = verdict.residual;
  doc["checks"] = to_json(report)["checks"];
  doc["condensation"] = to_json(graph);
  doc["meta"] = metadata(&game, std::nullopt, tol);
  Sink{out}.emit(o.out, doc.dump(2) + "\n");
  if (!o.dot.empty()) write_text_file(o.dot, condensation_to_dot(graph));
  return kSuccess;
}

}  // namespace

double resolve_tolerance(std::optional<double> flag) {
  double tol = kDefaultTolerances.equality;
  if (flag) {
    tol = *flag;
  } else if (const char* env = std::getenv(kToleranceEnv); env && *env) {
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), tol);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument(std::string(kToleranceEnv) + "='" + env + "' is not a number");
    }
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  return tol;
}

ordered_json metadata(const GameInstance* game, std::optional<std::uint64_t> seed, double tol) {
  ordered_json meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["instance_hash"] = game ? ordered_json(instance_hash(*game)) : ordered_json(nullptr);
  meta["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  meta["tolerance"] = tol;
  return meta;
}

ordered_json to_json(const EquilibriumCertificate& cert) {
  ordered_json doc;
  doc["c_star"] = vector_json(cert.c_star);
  doc["iterations"] = cert.iterations;
  doc["residual"] = cert.residual;
  doc["contraction_rate"] = cert.contraction_rate;
  return doc;
}

ordered_json to_json(const NashVerdict& verdict) {
  ordered_json doc;
  doc["verdict"] = verdict.is_nash;
  doc["residual"] = verdict.residual;
  doc["v_gaps"] = vector_json(verdict.gaps);
  doc["centralities"] = vector_json(verdict.centralities);
  doc["distance_to_equilibrium"] = verdict.distance_to_equilibrium;
  return doc;
}

ordered_json to_json(const StructureReport& report) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["status"] = to_string(c.status);
    e["detail"] = c.detail;
    e["witnesses"] = c.witnesses;
    checks.push_back(std::move(e));
  }
  ordered_json doc;
  doc["passed"] = report.passed();
  doc["checks"] = std::move(checks);
  return doc;
}

ordered_json to_json(const CondensationGraph& graph) {
  ordered_json comps = ordered_json::array();
  for (const auto& c : graph.components) {
    ordered_json e;
    ordered_json agents = ordered_json::array();
    for (int a : c.members) agents.push_back(a + 1);
    e["agents"] = std::move(agents);
    e["sink"] = c.sink;
    e["alpha"] = c.alpha ? ordered_json(*c.alpha) : ordered_json(nullptr);
    e["gamma"] = c.gamma ? ordered_json(*c.gamma) : ordered_json(nullptr);
    comps.push_back(std::move(e));
  }
  ordered_json edges = ordered_json::array();
  for (const auto& [from, to] : graph.edges) edges.push_back({from, to});
  ordered_json doc;
  doc["components"] = std::move(comps);
  doc["edges"] = std::move(edges);
  return doc;
}

std::string attach_meta(const std::string& document, const ordered_json& meta) {
  const auto close = document.rfind('}');
  std::string out = document.substr(0, close);
  while (!out.empty() && (out.back() == '\n' || out.back() == ' ')) out.pop_back();
  return out + ",\n  \"meta\": " + meta.dump() + "\n}\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budget-constrained Katz-centrality network formation game"};
  app.name(kToolName);
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random game instance");
  gen_cmd->add_option("--n", gen.n, "Number of agents")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--density", gen.density, "Probability of each off-diagonal edge")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_flag("--self-loops", gen.self_loops, "Give every agent a self-loop");
  gen_cmd->add_flag("--undirected", gen.undirected, "Sample a symmetric topology");
  gen_cmd->add_option("--budgets", gen.budgets, "Budget range lo:hi inside (0,1)");
  gen_cmd->add_option("--budget-levels", gen.budget_levels, "Draw budgets from k evenly spaced levels");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--name", gen.name, "Instance name");
  gen_cmd->add_option("--out", gen.out, "Output file (default stdout)");

  EquilibriumOptions eq;
  auto* eq_cmd = app.add_subcommand("equilibrium", "Compute the equilibrium centrality certificate");
  eq_cmd->add_option("--instance", eq.instance, "Instance file")->required();
  eq_cmd->add_option("--tol", eq.tol, "Tolerance (overrides $KATZFORGE_TOL)");
  eq_cmd->add_option("--out", eq.out, "Output file (default stdout)");

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run best-response dynamics and write a trace");
  run_cmd->add_option("--instance", run_opts.instance, "Instance file")->required();
  run_cmd->add_option("--mode", run_opts.mode, "standard | modified");
  run_cmd->add_option("--scheduler", run_opts.scheduler, "rr | random | seq:i,j,...");
  run_cmd->add_option("--seed", run_opts.seed, "Seed for the scheduler and random initial profile");
  run_cmd->add_option("--seeds", run_opts.seeds, "Batch mode: run every seed in a:b");
  run_cmd->add_option("--jobs", run_opts.jobs, "Parallel seeds in batch mode")->check(CLI::PositiveNumber);
  run_cmd->add_option("--w0", run_opts.w0, "zero | random | file:<path>");
  run_cmd->add_option("--max-steps", run_opts.max_steps, "Step limit (default 500n for standard)");
  run_cmd->add_option("--tol", run_opts.tol, "Tolerance (overrides $KATZFORGE_TOL)");
  run_cmd->add_flag("--no-lazy", run_opts.no_lazy, "Rewrite rows even when already a best response");
  run_cmd->add_flag("--full-trace", run_opts.full_trace, "Also write per-step allocation rows");
  run_cmd->add_option("--out", run_opts.out, "Trace CSV path")->required();

  CheckOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Certify whether an allocation is a Nash equilibrium");
  verify_cmd->add_option("--instance", verify.instance, "Instance file")->required();
  verify_cmd->add_option("--allocation", verify.allocation, "Allocation file")->required();
  verify_cmd->add_option("--tol", verify.tol, "Tolerance (overrides $KATZFORGE_TOL)");
  verify_cmd->add_option("--out", verify.out, "Output file (default stdout)");

  CheckOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Check equilibrium structure and export the condensation");
  analyze_cmd->add_option("--instance", analyze.instance, "Instance file")->required();
  analyze_cmd->add_option("--allocation", analyze.allocation, "Allocation file")->required();
  analyze_cmd->add_option("--tol", analyze.tol, "Tolerance (overrides $KATZFORGE_TOL)");
  analyze_cmd->add_option("--out", analyze.out, "Report file (default stdout)");
  analyze_cmd->add_option("--dot", analyze.dot, "Write the condensation graph as DOT");
  analyze_cmd->add_option("--max-cycle-len", analyze.max_cycle_length, "Cycle enumeration bound");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back(kToolName);
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out, err);
    if (*eq_cmd) return cmd_equilibrium(eq, out);
    if (*run_cmd) return cmd_run(run_opts, out);
    if (*verify_cmd) return cmd_verify(verify, out);
    if (*analyze_cmd) return cmd_analyze(analyze, out);
  } catch (const InfeasibleProfile& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasibleInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace katzforge::cli
