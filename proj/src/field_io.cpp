#include "selfdual/field_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "selfdual/functional.hpp"

namespace selfdual {

namespace {

struct Record {
  int32_t k[3] = {0, 0, 0};
  int32_t component = 0;
  double re = 0.0;
  double im = 0.0;
};

std::vector<Record> collect_records(const SpectralField& u) {
  const auto& g = *u.grid;
  std::vector<Record> recs;
  for (int j = 0; j < g.d; ++j)
    for (Eigen::Index f = 0; f < g.modes(); ++f) {
      if (g.keep[f] == 0.0) continue;
      Record r;
      for (int a = 0; a < g.d; ++a) r.k[a] = static_cast<int32_t>(g.kfreq[a][f]);
      r.component = j;
      const auto c = u.coeff[j * g.modes() + f];
      r.re = c.real();
      r.im = c.imag();
      recs.push_back(r);
    }
  return recs;
}

Eigen::Index flat_of_k(const TorusGrid& g, const int32_t* k) {
  Eigen::Index flat = 0;
  for (int a = 0; a < g.d; ++a) {
    int idx = k[a] >= 0 ? k[a] : k[a] + g.n;
    if (idx < 0 || idx >= g.n) throw std::runtime_error("field read: wavenumber out of range");
    flat = flat * g.n + idx;
  }
  return flat;
}

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("field read: truncated file");
  return v;
}

void write_field_records(std::ostream& out, const SpectralField& u) {
  const auto recs = collect_records(u);
  put<int64_t>(out, static_cast<int64_t>(recs.size()));
  for (const auto& r : recs) {
    for (int a = 0; a < u.grid->d; ++a) put<int32_t>(out, r.k[a]);
    put<int32_t>(out, r.component);
    put<double>(out, r.re);
    put<double>(out, r.im);
  }
}

SpectralField read_field_records(std::istream& in, const GridPtr& grid) {
  SpectralField u(grid);
  const int64_t count = get<int64_t>(in);
  for (int64_t i = 0; i < count; ++i) {
    int32_t k[3] = {0, 0, 0};
    for (int a = 0; a < grid->d; ++a) k[a] = get<int32_t>(in);
    const int32_t comp = get<int32_t>(in);
    const double re = get<double>(in), im = get<double>(in);
    if (comp < 0 || comp >= grid->d) throw std::runtime_error("field read: bad component");
    u.coeff[comp * grid->modes() + flat_of_k(*grid, k)] = {re, im};
  }
  return u;
}

}  // namespace

void write_field_csv(const std::string& filename, const SpectralField& u) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("write_field_csv: cannot open " + filename);
  const auto& g = *u.grid;
  out << "# selfdual field d=" << g.d << " n=" << g.n << " nu=" << g.nu << "\n";
  out << (g.d == 2 ? "k1,k2,component,re,im" : "k1,k2,k3,component,re,im") << "\n";
  out.precision(17);
  for (const auto& r : collect_records(u)) {
    for (int a = 0; a < g.d; ++a) out << r.k[a] << ',';
    out << r.component << ',' << std::scientific << r.re << ',' << r.im << '\n';
  }
}

SpectralField read_field_csv(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("read_field_csv: cannot open " + filename);
  std::string meta;
  std::getline(in, meta);
  int d = 0, n = 0;
  double nu = 0.0;
  if (std::sscanf(meta.c_str(), "# selfdual field d=%d n=%d nu=%lf", &d, &n, &nu) != 3)
    throw std::runtime_error("read_field_csv: bad metadata line");
  auto grid = TorusGrid::make(d, n, nu);
  SpectralField u(grid);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    int32_t k[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a) {
      std::getline(ss, tok, ',');
      k[a] = std::stoi(tok);
    }
    std::getline(ss, tok, ',');
    const int comp = std::stoi(tok);
    std::getline(ss, tok, ',');
    const double re = std::stod(tok);
    std::getline(ss, tok, ',');
    const double im = std::stod(tok);
    u.coeff[comp * grid->modes() + flat_of_k(*grid, k)] = {re, im};
  }
  return u;
}

void write_field_binary(const std::string& filename, const SpectralField& u) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw std::runtime_error("write_field_binary: cannot open " + filename);
  out.write("SDF1", 4);
  put<int32_t>(out, u.grid->d);
  put<int32_t>(out, u.grid->n);
  put<double>(out, u.grid->nu);
  write_field_records(out, u);
}

SpectralField read_field_binary(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw std::runtime_error("read_field_binary: cannot open " + filename);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SDF1")
    throw std::runtime_error("read_field_binary: bad magic");
  const int d = get<int32_t>(in);
  const int n = get<int32_t>(in);
  const double nu = get<double>(in);
  auto grid = TorusGrid::make(d, n, nu);
  return read_field_records(in, grid);
}

void write_path_binary(const std::string& filename, const Path& path) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw std::runtime_error("write_path_binary: cannot open " + filename);
  out.write("SDP1", 4);
  put<int32_t>(out, path.grid->d);
  put<int32_t>(out, path.grid->n);
  put<double>(out, path.grid->nu);
  put<int32_t>(out, static_cast<int32_t>(path.nodes.size()));
  put<double>(out, path.T);
  for (const auto& node : path.nodes) write_field_records(out, node);
}

Path read_path_binary(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw std::runtime_error("read_path_binary: cannot open " + filename);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SDP1")
    throw std::runtime_error("read_path_binary: bad magic");
  const int d = get<int32_t>(in);
  const int n = get<int32_t>(in);
  const double nu = get<double>(in);
  const int nodes = get<int32_t>(in);
  const double T = get<double>(in);
  auto grid = TorusGrid::make(d, n, nu);
  Path p(grid, T, nodes - 1);
  for (int i = 0; i < nodes; ++i)
    p.nodes[static_cast<std::size_t>(i)] = read_field_records(in, grid);
  return p;
}

}  // namespace selfdual
