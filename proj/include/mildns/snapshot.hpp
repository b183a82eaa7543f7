#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "mildns/field.hpp"

namespace mildns {

/// Binary field snapshot: one text header line
///   `mildns-field v1; <dim>; <M1,M2,...>; <scalar|vector>`
/// then row-major little-endian float64 samples, vector components stored one
/// after another.
void write_snapshot(const std::filesystem::path& path, const ScalarField& f);
void write_snapshot(const std::filesystem::path& path, const VectorField& u);

using Snapshot = std::variant<ScalarField, VectorField>;

/// Reads a snapshot, creating a fresh grid. Throws InputError on malformed files.
Snapshot read_snapshot(const std::filesystem::path& path);
/// Reads a snapshot onto an existing grid; throws ConfigError on shape mismatch.
Snapshot read_snapshot(const std::filesystem::path& path, const GridPtr& grid);

std::string snapshot_header(const TorusGrid& grid, bool vector);

}  // namespace mildns
