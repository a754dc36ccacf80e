#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "manifold_langevin/models.hpp"

namespace manifold_langevin {

/// Reads an observation CSV: optional '#' comment lines, a header row with
/// the column names, then one numeric row per observation. Throws
/// InputError on malformed content.
Observations read_observations_csv(std::istream& in);
Observations read_observations_csv(const std::filesystem::path& path);

/// Writes the header comment "# seed=<seed>" when a seed is given, then the
/// header row and rows at full precision.
void write_observations_csv(const Observations& obs, std::ostream& out,
                            std::optional<std::uint64_t> seed = {});

}  // namespace manifold_langevin
