#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "katzforge/analysis.hpp"
#include "katzforge/dynamics.hpp"
#include "katzforge/game.hpp"
#include "katzforge/instance.hpp"

namespace katzforge::cli {

inline constexpr const char* kToolName = "katzforge";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kToleranceEnv = "KATZFORGE_TOL";

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kStepLimit = 2,
  kInfeasibleInput = 3,
};

/// Flag value if given, else $KATZFORGE_TOL, else the library default.
/// Throws std::invalid_argument on a malformed or nonpositive value.
double resolve_tolerance(std::optional<double> flag);

/// Reproducibility header embedded in every artifact.
nlohmann::ordered_json metadata(const GameInstance* game, std::optional<std::uint64_t> seed, double tol);

nlohmann::ordered_json to_json(const EquilibriumCertificate& cert);
nlohmann::ordered_json to_json(const NashVerdict& verdict);
nlohmann::ordered_json to_json(const StructureReport& report);
nlohmann::ordered_json to_json(const CondensationGraph& graph);

/// Adds a "meta" member to a canonical instance/allocation document.
std::string attach_meta(const std::string& document, const nlohmann::ordered_json& meta);

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace katzforge::cli
