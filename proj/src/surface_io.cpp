#include "spinsq/surface_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinsq/config.hpp"
#include "spinsq/error.hpp"

namespace spinsq {

namespace {

constexpr const char *magic = "spinsq-surface 1";

std::string hexf(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

bool read_hex(std::istream &in, double &v) {
  std::string tok;
  if (!(in >> tok)) return false;
  char *end = nullptr;
  v = std::strtod(tok.c_str(), &end);
  return end && *end == '\0';
}

constexpr int cell_fields = 10;

double *cell_slot(SurfaceCell &c, int i) {
  double *slots[cell_fields] = {&c.energy_per_site, &c.total_energy, &c.mu_a, &c.mu_b,
                                &c.g2_aa, &c.g2_bb, &c.g2_ab, &c.g3_a, &c.g3_b, &c.phi2};
  return slots[i];
}

}  // namespace

std::string surface_key(const PhysicalSetup &setup, int N,
                        const std::vector<double> &atom_numbers,
                        const Eigen::VectorXd &depths, const LatticeOptions &lattice,
                        const GutzwillerOptions &options) {
  std::ostringstream s;
  s << hexf(setup.mass) << hexf(setup.wavelength) << hexf(setup.a_aa) << hexf(setup.a_bb)
    << hexf(setup.a_ab) << setup.coordination << hexf(setup.constants.hbar)
    << hexf(setup.constants.bohr) << hexf(setup.constants.amu) << '|' << N << '|';
  for (double a : atom_numbers) s << hexf(a) << ',';
  s << '|';
  for (double d : depths) s << hexf(d) << ',';
  s << '|' << lattice.plane_waves << ',' << lattice.quasi_momenta << ','
    << lattice.points_per_site << ',' << hexf(lattice.min_depth) << ','
    << hexf(lattice.band_tolerance) << ',' << hexf(lattice.normalization_tolerance);
  s << '|' << options.n_max << ',' << hexf(options.tol) << ',' << options.max_iter << ','
    << options.seed << ',' << options.random_starts << ',' << hexf(options.tail_tol) << ','
    << hexf(options.constraint_tol);
  return hex64(fnv1a(s.str()));
}

void save_surface(const std::filesystem::path &path, const EnergySurface &surface,
                  const std::string &key) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail(ErrorKind::Config, "cannot write surface cache " + tmp.string());
    out << magic << ' ' << key << '\n'
        << surface.N << ' ' << surface.atom_numbers.size() << ' ' << surface.depths.size()
        << '\n';
    for (double a : surface.atom_numbers) out << hexf(a) << ' ';
    out << '\n';
    for (double d : surface.depths) out << hexf(d) << ' ';
    out << '\n';
    for (auto c : surface.cells) {
      for (int i = 0; i < cell_fields; ++i) out << hexf(*cell_slot(c, i)) << ' ';
      out << '\n';
    }
    if (!out) fail(ErrorKind::Config, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<EnergySurface> load_surface(const std::filesystem::path &path,
                                          const std::string &key) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != std::string(magic) + ' ' + key) return std::nullopt;
  EnergySurface s;
  std::size_t rows = 0;
  Eigen::Index cols = 0;
  if (!(in >> s.N >> rows >> cols)) return std::nullopt;
  s.atom_numbers.resize(rows);
  s.depths.resize(cols);
  for (auto &a : s.atom_numbers)
    if (!read_hex(in, a)) return std::nullopt;
  for (Eigen::Index k = 0; k < cols; ++k)
    if (!read_hex(in, s.depths(k))) return std::nullopt;
  s.cells.resize(rows * static_cast<std::size_t>(cols));
  for (auto &c : s.cells)
    for (int i = 0; i < cell_fields; ++i)
      if (!read_hex(in, *cell_slot(c, i))) return std::nullopt;
  return s;
}

EnergySurface cached_surface(const std::filesystem::path &dir, const std::string &key,
                             const std::function<EnergySurface()> &build, bool *hit) {
  if (hit) *hit = false;
  if (dir.empty()) return build();
  const auto path = dir / ("surface-" + key + ".txt");
  if (auto s = load_surface(path, key)) {
    if (hit) *hit = true;
    return std::move(*s);
  }
  auto s = build();
  save_surface(path, s, key);
  return s;
}

}  // namespace spinsq
