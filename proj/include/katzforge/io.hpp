#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "katzforge/instance.hpp"

namespace katzforge {

/// Instance document:
///   { "n": int, "edges": [[i, j], ...], "budgets": [number | "decimal", ...],
///     "name": string (optional), "meta": object (optional, ignored) }
/// Indices are 1-based. Unknown fields are rejected. Structural problems
/// (bad indices, duplicate edges, SA1/SA2 violations) raise ParseError with
/// the offending field named.
GameInstance parse_instance(std::string_view text);

/// Canonical text form: sorted edges, shortest round-trip floats, no meta.
std::string serialize_instance(const GameInstance& game);

/// Allocation document: { "weights": [[row], ...], "meta": object (optional) }
/// with dense n x n rows. `expected_n` < 0 skips the size check.
AllocationProfile parse_allocation(std::string_view text, int expected_n = -1);
std::string serialize_allocation(const AllocationProfile& profile);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string instance_hash(const GameInstance& game);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);
/// Fixed 17 significant digits.
std::string format_double17(double value);

}  // namespace katzforge
