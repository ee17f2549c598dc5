#include <cstring>
#include <fstream>
#include <json.hpp>

#include "pinnproj/errors.hpp"
#include "pinnproj/mlp.hpp"

namespace pinnproj {

namespace {

constexpr char kMagic[8] = {'P', 'P', 'C', 'K', 'P', 'T', '0', '1'};

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("checkpoint: truncated file");
  return v;
}

bool is_json(const std::filesystem::path& path) { return path.extension() == ".json"; }

}  // namespace

void save_checkpoint(const MlpParams& params, const std::filesystem::path& path) {
  if (params.values.size() != parameter_count(params.layer_sizes)) {
    throw UsageError("save_checkpoint: parameter vector does not match layer sizes");
  }
  if (is_json(path)) {
    nlohmann::json j;
    j["layer_sizes"] = params.layer_sizes;
    j["seed"] = params.seed;
    j["values"] = params.values;
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << j.dump() << '\n';
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os.write(kMagic, sizeof(kMagic));
  write_pod(os, static_cast<std::uint32_t>(params.layer_sizes.size()));
  for (int s : params.layer_sizes) write_pod(os, static_cast<std::int32_t>(s));
  write_pod(os, static_cast<std::uint64_t>(params.seed));
  write_pod(os, static_cast<std::uint64_t>(params.values.size()));
  os.write(reinterpret_cast<const char*>(params.values.data()),
           static_cast<std::streamsize>(params.values.size() * sizeof(double)));
}

MlpParams load_checkpoint(const std::filesystem::path& path) {
  MlpParams p;
  if (is_json(path)) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read " + path.string());
    const nlohmann::json j = nlohmann::json::parse(is);
    p.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    p.seed = j.value("seed", std::uint64_t{0});
    p.values = j.at("values").get<std::vector<double>>();
  } else {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read " + path.string());
    char magic[sizeof(kMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
      throw ConfigError("checkpoint: bad magic in " + path.string());
    }
    const auto layers = read_pod<std::uint32_t>(is);
    for (std::uint32_t l = 0; l < layers; ++l) p.layer_sizes.push_back(read_pod<std::int32_t>(is));
    p.seed = read_pod<std::uint64_t>(is);
    const auto count = read_pod<std::uint64_t>(is);
    p.values.resize(count);
    is.read(reinterpret_cast<char*>(p.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw ConfigError("checkpoint: truncated payload");
  }
  if (p.values.size() != parameter_count(p.layer_sizes)) {
    throw ConfigError("checkpoint: parameter count does not match layer sizes");
  }
  return p;
}

}  // namespace pinnproj
