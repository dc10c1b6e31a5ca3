#pragma once

#include <filesystem>
#include <iosfwd>

#include "kslab/grid.hpp"

namespace kslab {

// Snapshot text format:
//   KSLAB1 dim nx ny [nz] Lx Ly [Lz]
//   v_0 v_1 ...            (lexicographic, x fastest, %.17g)
// The same format is accepted as input density data.

void write_snapshot(std::ostream& out, const GridField& field);
void write_snapshot(const std::filesystem::path& path, const GridField& field);

/// Parses a snapshot and rebuilds its grid from the header.
/// Throws std::runtime_error on malformed headers, short or non-numeric
/// bodies, or trailing data.
GridField read_snapshot(std::istream& in);
GridField read_snapshot(const std::filesystem::path& path);

}  // namespace kslab
