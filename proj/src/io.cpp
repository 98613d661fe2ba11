#include "katzforge/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "katzforge/errors.hpp"

namespace katzforge {
namespace {

using nlohmann::json;

std::string line_context(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_document(std::string_view text, const char* what) {
  try {
    auto doc = json::parse(text.begin(), text.end());
    if (!doc.is_object()) throw ParseError(std::string(what) + ": top level must be an object");
    return doc;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": malformed JSON at " + line_context(text, e.byte) + ": " +
                     e.what());
  }
}

void reject_unknown(const json& doc, std::initializer_list<std::string_view> allowed, const char* what) {
  for (const auto& [key, _] : doc.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ParseError(std::string(what) + ": unknown field '" + key + "'");
  }
}

const json& require_field(const json& doc, const char* field, const char* what) {
  auto it = doc.find(field);
  if (it == doc.end()) throw ParseError(std::string(what) + ": missing field '" + field + "'");
  return *it;
}

double parse_number(const json& value, const std::string& field) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    double out = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out, std::chars_format::fixed);
    if (ec != std::errc() || ptr != last || s.empty()) {
      throw ParseError("field '" + field + "': '" + s + "' is not a decimal number");
    }
    return out;
  }
  throw ParseError("field '" + field + "': expected a number or decimal string");
}

int parse_index(const json& value, int n, const std::string& field) {
  if (!value.is_number_integer()) throw ParseError("field '" + field + "': expected an integer");
  const auto idx = value.get<long long>();
  if (idx < 1 || idx > n) {
    throw ParseError("field '" + field + "': index " + std::to_string(idx) + " out of range 1.." +
                     std::to_string(n));
  }
  return static_cast<int>(idx - 1);
}

}  // namespace

GameInstance parse_instance(std::string_view text) {
  constexpr const char* what = "instance";
  const json doc = parse_document(text, what);
  reject_unknown(doc, {"n", "edges", "budgets", "name", "meta"}, what);

  const json& n_field = require_field(doc, "n", what);
  if (!n_field.is_number_integer() || n_field.get<long long>() < 1) {
    throw ParseError("field 'n': expected a positive integer");
  }
  const int n = static_cast<int>(n_field.get<long long>());

  const json& edges_field = require_field(doc, "edges", what);
  if (!edges_field.is_array()) throw ParseError("field 'edges': expected an array");
  std::vector<Edge> edges;
  std::set<Edge> seen;
  for (std::size_t k = 0; k < edges_field.size(); ++k) {
    const std::string field = "edges[" + std::to_string(k) + "]";
    const json& pair = edges_field[k];
    if (!pair.is_array() || pair.size() != 2) throw ParseError("field '" + field + "': expected [i, j]");
    Edge e{parse_index(pair[0], n, field + "[0]"), parse_index(pair[1], n, field + "[1]")};
    if (!seen.insert(e).second) throw ParseError("field '" + field + "': duplicate edge");
    edges.push_back(e);
  }

  const json& budgets_field = require_field(doc, "budgets", what);
  if (!budgets_field.is_array()) throw ParseError("field 'budgets': expected an array");
  if (budgets_field.size() != static_cast<std::size_t>(n)) {
    throw ParseError("field 'budgets': has " + std::to_string(budgets_field.size()) +
                     " entries, expected n=" + std::to_string(n));
  }
  std::vector<double> budgets;
  for (std::size_t k = 0; k < budgets_field.size(); ++k) {
    budgets.push_back(parse_number(budgets_field[k], "budgets[" + std::to_string(k) + "]"));
  }

  std::string name;
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw ParseError("field 'name': expected a string");
    name = it->get<std::string>();
  }
  if (auto it = doc.find("meta"); it != doc.end() && !it->is_object()) {
    throw ParseError("field 'meta': expected an object");
  }

  GameInstance game(Topology(n, std::move(edges)), std::move(budgets), std::move(name));
  if (auto report = validate_instance(game); !report.ok()) {
    throw ParseError("instance violates standing assumptions: " + report.describe());
  }
  return game;
}

std::string serialize_instance(const GameInstance& game) {
  std::ostringstream out;
  out << "{\n  \"n\": " << game.size() << ",\n  \"edges\": [";
  const auto& edges = game.topology().edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (k) out << ", ";
    out << '[' << edges[k].from + 1 << ", " << edges[k].to + 1 << ']';
  }
  out << "],\n  \"budgets\": [";
  for (int i = 0; i < game.size(); ++i) {
    if (i) out << ", ";
    out << format_double(game.budget(i));
  }
  out << ']';
  if (!game.name().empty()) out << ",\n  \"name\": " << json(game.name()).dump();
  out << "\n}\n";
  return out.str();
}

AllocationProfile parse_allocation(std::string_view text, int expected_n) {
  constexpr const char* what = "allocation";
  const json doc = parse_document(text, what);
  reject_unknown(doc, {"weights", "meta"}, what);
  const json& rows = require_field(doc, "weights", what);
  if (!rows.is_array() || rows.empty()) throw ParseError("field 'weights': expected a nonempty array");
  const auto n = static_cast<int>(rows.size());
  if (expected_n >= 0 && n != expected_n) {
    throw ParseError("field 'weights': has " + std::to_string(n) + " rows, instance has n=" +
                     std::to_string(expected_n));
  }
  Matrix w(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string field = "weights[" + std::to_string(i) + "]";
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ParseError("field '" + field + "': expected a row of " + std::to_string(n) + " numbers");
    }
    for (int j = 0; j < n; ++j) w(i, j) = parse_number(row[j], field + "[" + std::to_string(j) + "]");
  }
  return AllocationProfile(std::move(w));
}

std::string serialize_allocation(const AllocationProfile& profile) {
  std::ostringstream out;
  out << "{\n  \"weights\": [\n";
  for (int i = 0; i < profile.size(); ++i) {
    out << "    [";
    for (int j = 0; j < profile.size(); ++j) {
      if (j) out << ", ";
      out << format_double(profile(i, j));
    }
    out << (i + 1 < profile.size() ? "],\n" : "]\n");
  }
  out << "  ]\n}\n";
  return out.str();
}

std::string instance_hash(const GameInstance& game) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_instance(game)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, ptr);
  // Keep integral values recognisable as floats in JSON output.
  if (std::isfinite(value) && s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string format_double17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace katzforge
