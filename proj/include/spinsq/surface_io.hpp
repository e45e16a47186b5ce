#pragma once

// On-disk cache for energy surfaces. Values are stored as hex floats so a
// reload is bit-identical to the computed table.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "spinsq/gutzwiller.hpp"
#include "spinsq/lattice.hpp"
#include "spinsq/units.hpp"

namespace spinsq {

/// Content hash of everything that determines a surface.
std::string surface_key(const PhysicalSetup &setup, int N,
                        const std::vector<double> &atom_numbers,
                        const Eigen::VectorXd &depths, const LatticeOptions &lattice,
                        const GutzwillerOptions &options);

void save_surface(const std::filesystem::path &path, const EnergySurface &surface,
                  const std::string &key);

/// nullopt when the file is missing, unreadable or was written for another key.
std::optional<EnergySurface> load_surface(const std::filesystem::path &path,
                                          const std::string &key);

/// Loads dir/surface-<key>.txt or builds and stores it. An empty dir disables
/// the cache.
EnergySurface cached_surface(const std::filesystem::path &dir, const std::string &key,
                             const std::function<EnergySurface()> &build,
                             bool *hit = nullptr);

}  // namespace spinsq
