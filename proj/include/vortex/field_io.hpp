#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "vortex/grid.hpp"

namespace vortex {

/// VXF1 field dump: one text header line
///   VXF1 nx=<Nx> ny=<Ny> lx=<Lx> ly=<Ly> kind=<periodic|planar>
/// followed by Nx·Ny little-endian IEEE-754 doubles in row-major order.
/// lx, ly are the sampled extents (cell edges, or 2L for a planar box) printed
/// with 17 significant digits so the grid is reconstructed exactly.
void write_field(std::ostream& os, const Field& f);
void write_field(const std::filesystem::path& path, const Field& f);

std::string field_header(const Grid& grid);

/// Throws ConfigError on a malformed header or truncated payload.
Field read_field(std::istream& is);
Field read_field(const std::filesystem::path& path);

}  // namespace vortex
