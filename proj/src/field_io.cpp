#include "polyhess/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "polyhess/errors.hpp"

namespace polyhess {

namespace fs = std::filesystem;

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

fs::path with_suffix(const fs::path& stem, const char* suffix) {
  return fs::path(stem.string() + suffix);
}

fs::path strip_data_suffix(const fs::path& p) {
  const std::string s = p.string();
  if (s.size() > 4 && s.ends_with(".f64")) return fs::path(s.substr(0, s.size() - 4));
  return p;
}

}  // namespace

FieldDumpPaths write_field(const fs::path& stem, const ScalarField& u) {
  FieldDumpPaths paths{with_suffix(stem, ".f64"), with_suffix(stem, ".meta.json")};
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  std::ofstream data(paths.data, std::ios::binary);
  if (!data) throw std::runtime_error("cannot write " + paths.data.string());
  for (double v : u.values()) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
    data.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  const BoxDomain& d = u.domain();
  nlohmann::json meta;
  meta["dim"] = d.dim;
  meta["counts"] = std::vector<int>(d.nodes.begin(), d.nodes.begin() + d.dim);
  std::vector<double> spacing, extent;
  for (int a = 0; a < d.dim; ++a) {
    spacing.push_back(d.spacing(a));
    extent.push_back(d.extent[a]);
  }
  meta["spacing"] = spacing;
  meta["extent"] = extent;
  meta["ghost_width"] = u.ghost_width();
  meta["dtype"] = "float64-le";
  meta["order"] = "row-major";
  std::ofstream(paths.meta) << meta.dump(2) << "\n";
  return paths;
}

ScalarField read_field(const fs::path& stem_or_data) {
  const fs::path stem = strip_data_suffix(stem_or_data);
  std::ifstream meta_in(with_suffix(stem, ".meta.json"));
  if (!meta_in) throw ConfigError("missing field header " + with_suffix(stem, ".meta.json").string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad field header: ") + e.what());
  }
  BoxDomain d;
  d.dim = meta.at("dim").get<int>();
  const auto counts = meta.at("counts").get<std::vector<int>>();
  if (static_cast<int>(counts.size()) != d.dim) throw ConfigError("field header: counts/dim mismatch");
  for (int a = 0; a < 3; ++a) {
    d.nodes[a] = a < d.dim ? counts[a] : 1;
    d.extent[a] = 1.0;
  }
  if (meta.contains("extent")) {
    const auto ext = meta["extent"].get<std::vector<double>>();
    for (int a = 0; a < d.dim; ++a) d.extent[a] = ext.at(a);
  } else {
    const auto sp = meta.at("spacing").get<std::vector<double>>();
    for (int a = 0; a < d.dim; ++a) d.extent[a] = sp.at(a) * (d.nodes[a] + 1);
  }
  validate(d);
  std::ifstream data(with_suffix(stem, ".f64"), std::ios::binary);
  if (!data) throw ConfigError("missing field data " + with_suffix(stem, ".f64").string());
  std::vector<double> values(d.size());
  for (double& v : values) {
    std::uint64_t bits = 0;
    if (!data.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw ConfigError("field data truncated");
    v = std::bit_cast<double>(to_little(bits));
  }
  return ScalarField(d, meta.value("ghost_width", 0), std::move(values));
}

void write_field_csv(const fs::path& path, const ScalarField& u) {
  const BoxDomain& d = u.domain();
  if (d.dim != 2) throw ContractError("CSV export is only defined for 2-D fields");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out.precision(17);
  out << "x,y,value\n";
  for_each_node(d, [&](const Index& idx, std::size_t f) {
    const Point p = d.point(idx);
    out << p[0] << "," << p[1] << "," << u[f] << "\n";
  });
}

}  // namespace polyhess
