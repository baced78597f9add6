#pragma once

// Grid specs, sample files, JSON/CSV emission and atomic file output for the
// command line tool.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "gcut/gcut.hpp"

namespace gcut::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Grid specs

struct GridFlags {
  std::optional<double> eps;
  std::optional<double> lambda;
};

inline std::vector<std::size_t> parse_shape(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("grid 'shape' must be a nonempty array");
  std::vector<std::size_t> shape;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 1)
      throw InvalidArgument("grid 'shape' entries must be positive integers");
    shape.push_back(v.get<std::size_t>());
  }
  return shape;
}

inline std::vector<double> parse_numbers(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string("'") + what + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidArgument(std::string("'") + what + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::optional<double> parse_lambda(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "auto") return std::nullopt;
    throw InvalidArgument("'lambda' must be a number or \"auto\"");
  }
  if (!j.is_number()) throw InvalidArgument("'lambda' must be a number or \"auto\"");
  return j.get<double>();
}

/// {"shape":[r,c],"weights":[...]} or {"named":..., "eps":..., "lambda":...}.
inline ProbabilityGrid grid_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("grid spec must be a JSON object");
  std::vector<double> origin, spacing;
  if (j.contains("origin")) origin = parse_numbers(j["origin"], "origin");
  if (j.contains("spacing")) spacing = parse_numbers(j["spacing"], "spacing");
  auto place = [&](ProbabilityGrid g) {
    if (origin.empty() && spacing.empty()) return g;
    return ProbabilityGrid(g.shape(), g.p(), origin, spacing);
  };
  if (j.contains("named")) {
    DistributionParams params;
    if (j.contains("shape")) params.shape = parse_shape(j["shape"]);
    if (j.contains("eps")) {
      if (!j["eps"].is_number()) throw InvalidArgument("'eps' must be a number");
      params.eps = j["eps"].get<double>();
    }
    if (j.contains("lambda")) params.lambda = parse_lambda(j["lambda"]);
    if (j.contains("weights")) params.weights = parse_numbers(j["weights"], "weights");
    if (!j["named"].is_string()) throw InvalidArgument("'named' must be a string");
    return place(named_distribution(j["named"].get<std::string>(), params));
  }
  if (!j.contains("weights")) throw InvalidArgument("grid spec needs 'weights' or 'named'");
  const auto w = parse_numbers(j["weights"], "weights");
  auto shape = j.contains("shape") ? parse_shape(j["shape"]) : std::vector<std::size_t>{w.size()};
  return ProbabilityGrid(std::move(shape), normalize_weights(w), origin, spacing);
}

/// Shorthand names: example1, uniformRxC, bimodal3x3, band4x4.
inline std::optional<ProbabilityGrid> grid_from_shorthand(const std::string& s,
                                                          const GridFlags& flags) {
  if (s == "example1") return uniform_grid({2, 2});
  if (s == "bimodal3x3") return bimodal3x3(flags.eps.value_or(0.4), flags.lambda);
  if (s == "band4x4") return band4x4(flags.eps.value_or(1.0));
  if (s.rfind("uniform", 0) == 0) {
    std::vector<std::size_t> shape;
    std::stringstream ss(s.substr(7));
    std::string part;
    while (std::getline(ss, part, 'x')) {
      if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
        return std::nullopt;
      shape.push_back(std::stoul(part));
    }
    if (shape.empty()) return std::nullopt;
    return uniform_grid(shape);
  }
  return std::nullopt;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("malformed JSON in " + origin + ": " + e.what());
  }
}

/// Inline JSON, a JSON file path, or a shorthand name.
inline ProbabilityGrid load_grid(const std::string& spec, const GridFlags& flags = {}) {
  const auto first = spec.find_first_not_of(" \t\n");
  if (first != std::string::npos && spec[first] == '{')
    return grid_from_json(parse_json_text(spec, "grid spec"));
  if (auto g = grid_from_shorthand(spec, flags)) return *g;
  if (std::filesystem::is_regular_file(spec))
    return grid_from_json(parse_json_text(read_file(spec), "'" + spec + "'"));
  throw InvalidArgument("unknown grid '" + spec +
                        "' (inline JSON, a JSON file, example1, uniformRxC, bimodal3x3, band4x4)");
}

// ---------------------------------------------------------------------------
// Numeric columns and lists

/// Comma separated numbers.
inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("not a number: '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw InvalidArgument("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// One numeric column of a CSV file: '#' lines skipped, optional header;
/// column `name` if given, else "value" if present, else the last column.
inline std::vector<double> read_column(const std::string& path, const std::string& name = {}) {
  std::istringstream in(read_file(path));
  std::string line;
  std::optional<std::size_t> col;
  bool first = true;
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (first) {
      first = false;
      bool header = false;
      for (const auto& c : cells) {
        try {
          std::size_t used = 0;
          std::stod(c, &used);
        } catch (const std::exception&) {
          header = true;
        }
      }
      if (header) {
        const std::string want = name.empty() ? "value" : name;
        for (std::size_t k = 0; k < cells.size(); ++k)
          if (cells[k] == want) col = k;
        if (!col) {
          if (!name.empty()) throw InvalidArgument("column '" + name + "' not found in " + path);
          col = cells.size() - 1;
        }
        continue;
      }
    }
    const std::size_t k = col.value_or(cells.size() - 1);
    if (k >= cells.size()) throw InvalidArgument("short row in " + path);
    const auto v = parse_list(cells[k]);
    if (v.size() != 1) throw InvalidArgument("bad cell in " + path);
    out.push_back(v[0]);
  }
  return out;
}

/// Counts as an inline comma list or a file (JSON array or CSV column).
inline DiscretizedSample load_counts(const std::string& spec) {
  std::vector<double> raw;
  if (std::filesystem::is_regular_file(spec)) {
    const auto text = read_file(spec);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[')
      raw = parse_numbers(parse_json_text(text, "'" + spec + "'"), "counts");
    else
      raw = read_column(spec, "count");
  } else {
    raw = parse_list(spec);
  }
  std::vector<std::int64_t> y;
  for (double v : raw) {
    if (v < 0 || v != std::floor(v)) throw InvalidArgument("counts must be nonnegative integers");
    y.push_back(static_cast<std::int64_t>(v));
  }
  DiscretizedSample s(std::move(y));
  if (s.n < 1) throw InvalidArgument("counts must sum to at least 1");
  return s;
}

/// Points file: one point per line, coordinates separated by commas.
inline std::vector<std::vector<double>> load_points(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::vector<double>> pts;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      pts.push_back(parse_list(line));
    } catch (const InvalidArgument&) {
      if (pts.empty()) continue;  // header row
      throw;
    }
  }
  return pts;
}

inline std::vector<std::size_t> parse_nodes(const std::string& s) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  for (double v : parse_list(s)) {
    if (v < 0 || v != std::floor(v)) throw InvalidArgument("node ids must be nonnegative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metadata and output

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

struct Meta {
  std::string command;
  std::string config_hash;
  std::optional<std::uint64_t> seed;
  std::string version;
  std::vector<std::pair<std::string, std::string>> notes;
};

/// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string csv(const Meta& meta) const {
    std::ostringstream out;
    out << "# tool=gcut " << meta.version << "\n";
    out << "# command=" << meta.command << "\n";
    out << "# config_hash=" << meta.config_hash << "\n";
    out << "# seed=" << (meta.seed ? std::to_string(*meta.seed) : "none") << "\n";
    for (const auto& [k, v] : meta.notes) out << "# " << k << "=" << v << "\n";
    for (std::size_t k = 0; k < columns_.size(); ++k) out << (k ? "," : "") << columns_[k];
    out << "\n";
    for (const auto& r : rows_) {
      for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
      out << "\n";
    }
    return out.str();
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& r : rows_) {
      json obj = json::object();
      for (std::size_t k = 0; k < columns_.size(); ++k) {
        const auto& cell = r[k];
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (!cell.empty() && end && *end == '\0' && std::isfinite(v))
          obj[columns_[k]] = v;
        else
          obj[columns_[k]] = cell;
      }
      arr.push_back(std::move(obj));
    }
    return arr;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline json meta_json(const Meta& meta) {
  json m = {{"tool", "gcut"},
            {"version", meta.version},
            {"command", meta.command},
            {"config_hash", meta.config_hash}};
  m["seed"] = meta.seed ? json(*meta.seed) : json(nullptr);
  for (const auto& [k, v] : meta.notes) m[k] = v;
  return m;
}

/// JSON document with "_meta" as the first key.
inline std::string json_document(json body, const Meta& meta) {
  if (!body.is_object()) body = json{{"data", std::move(body)}};
  body["_meta"] = meta_json(meta);
  return body.dump(2) + "\n";
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw InvalidArgument("failed writing '" + path + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InvalidArgument("cannot move output into '" + path + "'");
  }
}

// ---------------------------------------------------------------------------
// JSON views of library results

inline json nodes_json(const Partition& s) { return s.members(); }

inline json partition_json(const Partition& s) {
  return json{{"S", s.members()}, {"complement", s.complement_members()}, {"label", s.to_string()}};
}

inline json cut_report_json(const CutReport& r) {
  json mins = json::array();
  for (const auto& s : r.minimizers) mins.push_back(partition_json(s));
  json skipped = json::array();
  for (const auto& s : r.skipped) skipped.push_back(s.to_string());
  return json{{"kind", r.kind},
              {"value", r.value},
              {"minimizers", mins},
              {"tolerance", r.tolerance},
              {"candidates", r.candidates},
              {"skipped_count", r.skipped_count},
              {"skipped", skipped}};
}

inline json multiway_report_json(const MultiwayReport& r) {
  json mins = json::array();
  for (const auto& s : r.minimizers) mins.push_back(s.labels());
  return json{{"kind", r.kind},           {"k", r.k},
              {"value", r.value},         {"minimizers", mins},
              {"tolerance", r.tolerance}, {"candidates", r.candidates},
              {"skipped_count", r.skipped_count}};
}

inline json optional_number(std::optional<double> v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

inline json xist_json(const XistResult& r) {
  json steps = json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"s", s.s},
                     {"t", s.t},
                     {"st_value", s.st_value},
                     {"partition", partition_json(s.partition)},
                     {"value", optional_number(s.value)}});
  return json{{"kind", r.kind},
              {"value", std::isfinite(r.value) ? json(r.value) : json(nullptr)},
              {"partition", r.partition ? partition_json(*r.partition) : json(nullptr)},
              {"vloc", r.vloc},
              {"steps", steps},
              {"terminated_trivially", r.terminated_trivially}};
}

inline json st_cut_json(const StCutResult& r) {
  const auto p = r.partition();
  std::vector<std::size_t> side;
  for (std::size_t i = 0; i < r.source_side.size(); ++i)
    if (r.source_side[i]) side.push_back(i);
  return json{{"s", r.s},       {"t", r.t},
              {"value", r.value}, {"flow", r.flow},
              {"source_side", side}, {"partition", partition_json(p)}};
}

/// Nodes with centers and masses plus the weighted edge list.
inline json graph_json(const WeightedGraph& g, const ProbabilityGrid* grid, double t) {
  json nodes = json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    json n = {{"id", i}, {"degree", g.degree(i)}};
    if (grid) {
      const auto c = grid->center(i);
      n["center"] = std::vector<double>(c.begin(), c.end());
    }
    if (g.has_masses()) n["mass"] = g.masses()[i];
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({{"i", e.i}, {"j", e.j}, {"w", e.w}});
  json out = {{"nodes", nodes}, {"edges", edges}, {"t", t}};
  if (g.sample_size() > 0) out["n"] = g.sample_size();
  return out;
}

/// Inverse of graph_json: masses when every node has one, else explicit edges.
inline WeightedGraph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
    throw InvalidArgument("graph dump needs 'nodes' and 'edges'");
  const std::size_t m = j["nodes"].size();
  if (m < 2) throw InvalidArgument("graph needs at least two nodes");
  bool masses = true;
  std::vector<double> x(m, 0.0);
  for (const auto& n : j["nodes"]) {
    const auto id = n.at("id").get<std::size_t>();
    if (id >= m) throw InvalidArgument("node id out of range");
    if (n.contains("mass"))
      x[id] = n["mass"].get<double>();
    else
      masses = false;
  }
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    const auto i = e.at("i").get<std::size_t>(), k = e.at("j").get<std::size_t>();
    if (i >= m || k >= m || i == k) throw InvalidArgument("invalid edge in graph dump");
    edges.push_back({i, k, e.at("w").get<double>()});
  }
  if (masses) {
    Adjacency adj(m);
    for (const auto& e : edges) adj.connect(e.i, e.j);
    return WeightedGraph::from_masses(adj, x);
  }
  return WeightedGraph::from_edges(m, edges);
}

}  // namespace gcut::io
