#include <bit>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pinnproj/errors.hpp"
#include "pinnproj/pde.hpp"

namespace pinnproj {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "dataset payload assumes a little-endian host");

json grid_json(const Grid& g) {
  return {{"dims", g.dims}, {"nx", g.nx}, {"ny", g.ny}, {"nt", g.nt}, {"dx", g.dx},
          {"dy", g.dy},     {"dt", g.dt}, {"x0", g.x0}, {"y0", g.y0}};
}

Grid grid_from(const json& j) {
  Grid g;
  g.dims = j.at("dims").get<int>();
  g.nx = j.at("nx").get<int>();
  g.ny = j.at("ny").get<int>();
  g.nt = j.at("nt").get<int>();
  g.dx = j.at("dx").get<double>();
  g.dy = j.at("dy").get<double>();
  g.dt = j.at("dt").get<double>();
  g.x0 = j.value("x0", 0.0);
  g.y0 = j.value("y0", 0.0);
  g.validate();
  return g;
}

json header_json(const Field& field, const PdeSpec& spec, const std::string& tag, const char* encoding,
                 const std::string& config_hash) {
  json h = {{"format", "pinnproj-dataset"},
          {"version", 1},
          {"pde", std::string(to_string(spec.kind))},
          {"coefficients", spec.coefficients},
          {"conserved", spec.conserved},
          {"grid", grid_json(field.grid)},
          {"solver", tag},
          {"companion", !field.companion.empty()},
          {"encoding", encoding}};
  if (!config_hash.empty()) h["config_hash"] = config_hash;
  return h;
}

DatasetHeader header_from(const json& j) {
  if (j.value("format", "") != "pinnproj-dataset") throw ConfigError("not a dataset file");
  DatasetHeader h;
  h.spec = PdeSpec::standard(parse_pde_kind(j.at("pde").get<std::string>()));
  h.spec.coefficients = j.at("coefficients").get<std::map<std::string, double>>();
  h.spec.conserved = j.value("conserved", h.spec.conserved);
  h.grid = grid_from(j.at("grid"));
  h.solver = j.value("solver", "");
  h.version = j.value("version", 1);
  h.config_hash = j.value("config_hash", "");
  return h;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_dataset(const Field& field, const PdeSpec& spec, const std::string& tag,
                   const std::filesystem::path& path, DatasetFormat format, const std::string& config_hash) {
  if (field.values.size() != field.grid.total_points()) throw UsageError("write_dataset: field shape mismatch");
  const bool companion = !field.companion.empty();
  if (format == DatasetFormat::Binary) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << header_json(field, spec, tag, "float64-le", config_hash).dump() << '\n';
    os.write(reinterpret_cast<const char*>(field.values.data()),
             static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (companion) {
      os.write(reinterpret_cast<const char*>(field.companion.data()),
               static_cast<std::streamsize>(field.companion.size() * sizeof(double)));
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  const Grid& g = field.grid;
  os << "# " << header_json(field, spec, tag, "csv", config_hash).dump() << '\n';
  os << (g.dims == 2 ? "t,x,y,u" : "t,x,u") << (companion ? ",u_t" : "") << '\n';
  for (int n = 0; n < g.nt; ++n) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t k = field.index(n, j, i);
        os << fmt(g.t(n)) << ',' << fmt(g.x(i));
        if (g.dims == 2) os << ',' << fmt(g.y(j));
        os << ',' << fmt(field.values[k]);
        if (companion) os << ',' << fmt(field.companion[k]);
        os << '\n';
      }
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Field read_dataset(const std::filesystem::path& path, DatasetHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open dataset " + path.string());
  std::string first;
  std::getline(is, first);
  const bool csv = first.rfind("# ", 0) == 0;
  json j;
  try {
    j = json::parse(csv ? first.substr(2) : first);
  } catch (const json::exception& e) {
    throw ConfigError("dataset header is not valid JSON: " + std::string(e.what()));
  }
  DatasetHeader h = header_from(j);
  const bool companion = j.value("companion", false);
  Field field(h.grid);
  if (companion) field.companion.assign(field.values.size(), 0.0);
  if (!csv) {
    is.read(reinterpret_cast<char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (companion) {
      is.read(reinterpret_cast<char*>(field.companion.data()),
              static_cast<std::streamsize>(field.companion.size() * sizeof(double)));
    }
    if (!is) throw ConfigError("dataset payload truncated: " + path.string());
  } else {
    std::string line;
    std::getline(is, line);  // column names
    const int value_col = h.grid.dims == 2 ? 3 : 2;
    std::size_t k = 0;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      if (k >= field.values.size()) throw ConfigError("dataset has too many rows");
      std::stringstream ss(line);
      std::string cell;
      for (int c = 0; std::getline(ss, cell, ','); ++c) {
        if (c == value_col) field.values[k] = std::stod(cell);
        if (companion && c == value_col + 1) field.companion[k] = std::stod(cell);
      }
      ++k;
    }
    if (k != field.values.size()) throw ConfigError("dataset has too few rows");
  }
  if (header) *header = std::move(h);
  return field;
}

void write_series(const ConservedSeries& series, const std::filesystem::path& path, const std::string& config_hash) {
  json j{{"kind", std::string(to_string(series.kind()))},
         {"mode", series.mode() == SeriesMode::Constant ? "constant" : "time_varying"},
         {"times", series.times()},
         {"values", series.values()}};
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

ConservedSeries read_series(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open series " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("series file is not valid JSON: " + std::string(e.what()));
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "linear" && kind != "quadratic") throw ConfigError("series: unknown kind " + kind);
  const ConservedKind k = kind == "linear" ? ConservedKind::Linear : ConservedKind::Quadratic;
  const auto values = j.at("values").get<std::vector<double>>();
  if (j.at("mode").get<std::string>() == "constant") {
    if (values.size() != 1) throw ConfigError("series: constant mode needs one value");
    return ConservedSeries::constant(k, values.front());
  }
  return ConservedSeries::time_varying(k, j.at("times").get<std::vector<double>>(), values);
}

}  // namespace pinnproj
