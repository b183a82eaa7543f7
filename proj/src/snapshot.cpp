#include "mildns/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mildns/errors.hpp"

namespace mildns {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

void write_values(std::ofstream& os, std::span<const double> v) {
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("cannot write snapshot " + path.string());
  return os;
}

}  // namespace

std::string snapshot_header(const TorusGrid& grid, bool vector) {
  std::ostringstream os;
  os << "mildns-field v1; " << grid.dim() << "; ";
  for (int a = 0; a < grid.dim(); ++a) os << (a ? "," : "") << grid.resolution(a);
  os << "; " << (vector ? "vector" : "scalar");
  return os.str();
}

void write_snapshot(const std::filesystem::path& path, const ScalarField& f) {
  auto os = open_out(path);
  os << snapshot_header(f.grid(), false) << '\n';
  write_values(os, f.values());
}

void write_snapshot(const std::filesystem::path& path, const VectorField& u) {
  auto os = open_out(path);
  os << snapshot_header(u.grid(), true) << '\n';
  for (const auto& c : u.components()) write_values(os, c.values());
}

Snapshot read_snapshot(const std::filesystem::path& path) { return read_snapshot(path, nullptr); }

Snapshot read_snapshot(const std::filesystem::path& path, const GridPtr& grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open snapshot " + path.string());
  std::string header;
  std::getline(is, header);

  std::vector<std::string> parts;
  std::stringstream hs(header);
  for (std::string item; std::getline(hs, item, ';');) parts.push_back(trim(item));
  if (parts.size() != 4 || parts[0] != "mildns-field v1")
    throw InputError("not a mildns field snapshot: " + path.string());

  int dim = 0;
  try {
    dim = std::stoi(parts[1]);
  } catch (const std::exception&) {
    throw InputError("bad dimension in snapshot header");
  }
  std::vector<int> res;
  std::stringstream rs(parts[2]);
  for (std::string item; std::getline(rs, item, ',');) {
    try {
      res.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw InputError("bad resolution in snapshot header");
    }
  }
  if (static_cast<int>(res.size()) != dim) throw InputError("snapshot resolution count does not match dimension");
  const bool vector = parts[3] == "vector";
  if (!vector && parts[3] != "scalar") throw InputError("snapshot kind must be scalar or vector");

  GridPtr g = grid;
  if (g) {
    if (g->dim() != dim) throw ConfigError("snapshot dimension does not match the configured grid");
    for (int a = 0; a < dim; ++a)
      if (g->resolution(a) != res[static_cast<std::size_t>(a)])
        throw ConfigError("snapshot resolution does not match the configured grid");
  } else {
    g = make_grid(res);
  }

  auto read_component = [&]() {
    std::vector<double> v(g->size());
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (is.gcount() != static_cast<std::streamsize>(v.size() * sizeof(double)))
      throw InputError("snapshot truncated: " + path.string());
    return ScalarField(g, std::move(v));
  };

  if (!vector) return read_component();
  std::vector<ScalarField> comps;
  for (int a = 0; a < dim; ++a) comps.push_back(read_component());
  return VectorField(std::move(comps));
}

}  // namespace mildns
