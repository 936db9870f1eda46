#include "gravcs/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "field snapshots assume a little-endian host");

namespace gravcs {

namespace {

constexpr char kMagic[4] = {'G', 'C', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("field snapshot truncated");
  return v;
}

void write_header(std::ostream& os, const GridManifold& g, int degree,
                  int rank, std::uint64_t count) {
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, g.dim());
  put<std::int32_t>(os, g.orientation());
  put<std::uint32_t>(os, g.topology() == Topology::torus ? 0u : 1u);
  put<std::int32_t>(os, g.interval_axis());
  put<std::uint32_t>(os, degree);
  put<std::uint32_t>(os, rank);
  for (int a = 0; a < g.dim(); ++a) {
    put<std::uint32_t>(os, g.axis(a).nodes);
    put<double>(os, g.axis(a).period);
  }
  put<std::uint64_t>(os, count);
}

struct Header {
  GridManifold grid;
  int degree;
  int rank;
  std::uint64_t count;
};

Header read_header(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a field snapshot (bad magic)");
  if (get<std::uint32_t>(is) != kVersion)
    throw std::runtime_error("unsupported field snapshot version");
  int dim = static_cast<int>(get<std::uint32_t>(is));
  int orientation = get<std::int32_t>(is);
  Topology topo = get<std::uint32_t>(is) == 0 ? Topology::torus
                                              : Topology::torus_interval;
  int interval_axis = get<std::int32_t>(is);
  int degree = static_cast<int>(get<std::uint32_t>(is));
  int rank = static_cast<int>(get<std::uint32_t>(is));
  if (dim < 1 || dim > max_dim)
    throw std::runtime_error("field snapshot has bad dimension");
  std::vector<int> nodes(dim);
  std::vector<double> periods(dim);
  for (int a = 0; a < dim; ++a) {
    nodes[a] = static_cast<int>(get<std::uint32_t>(is));
    periods[a] = get<double>(is);
  }
  GridManifold grid(dim, nodes, periods, orientation, topo, interval_axis);
  return {grid, degree, rank, get<std::uint64_t>(is)};
}

void write_payload(const std::string& path, const GridManifold& g, int degree,
                   int rank, const double* v, std::uint64_t count) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_header(os, g, degree, rank, count);
  os.write(reinterpret_cast<const char*>(v),
           static_cast<std::streamsize>(count * sizeof(double)));
  if (!os) throw std::runtime_error("short write to " + path);
}

}  // namespace

void write_field(const std::string& path, const FormField& f) {
  write_payload(path, f.grid(), f.degree(), 0, f.data(),
                static_cast<std::uint64_t>(f.size()));
}

void write_field(const std::string& path, const MatrixFormField& f) {
  write_payload(path, f.grid(), f.degree(), f.rank(), f.data(),
                static_cast<std::uint64_t>(f.size()));
}

FormField read_scalar_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  Header h = read_header(is);
  if (h.rank != 0)
    throw std::runtime_error("snapshot holds a matrix field, not a scalar one");
  FormField f(h.grid, h.degree);
  if (h.count != static_cast<std::uint64_t>(f.size()))
    throw std::runtime_error("field snapshot payload size mismatch");
  is.read(reinterpret_cast<char*>(f.data()),
          static_cast<std::streamsize>(h.count * sizeof(double)));
  if (!is) throw std::runtime_error("field snapshot truncated");
  return f;
}

MatrixFormField read_matrix_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  Header h = read_header(is);
  if (h.rank == 0)
    throw std::runtime_error("snapshot holds a scalar field, not a matrix one");
  MatrixFormField f(h.grid, h.degree, h.rank);
  if (h.count != static_cast<std::uint64_t>(f.size()))
    throw std::runtime_error("field snapshot payload size mismatch");
  is.read(reinterpret_cast<char*>(f.data()),
          static_cast<std::streamsize>(h.count * sizeof(double)));
  if (!is) throw std::runtime_error("field snapshot truncated");
  return f;
}

}  // namespace gravcs
