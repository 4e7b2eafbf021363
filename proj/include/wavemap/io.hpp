#pragma once

#include <wavemap/field.hpp>

#include <filesystem>
#include <string>

namespace wavemap {

/// Shortest round-trip decimal form of `x` (locale independent).
std::string format_double(double x);

/// Writes `<stem>.csv` (header `r,psi,psidot`) and the sidecar `<stem>.json`
/// holding {t, ell, target, r_max, n_nodes}.
void write_snapshot(const std::filesystem::path& stem, const FieldState& state);

/// Reads a snapshot written by write_snapshot. Custom targets must be
/// supplied by the caller since the sidecar only records the name.
FieldState read_snapshot(const std::filesystem::path& stem,
                         const TargetGeometry* custom_target = nullptr);

} // namespace wavemap
