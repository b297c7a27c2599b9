#pragma once

#include <filesystem>
#include <string>

#include "rotbec/field.hpp"
#include "rotbec/potential.hpp"

namespace rotbec {

/// Binary field snapshot:
///   "RBEC1", n (u32), L (f64), a (f64), omega (f64),
///   potential tag length (u32) and bytes, parameter count (u32) and f64 values,
///   then n^2 complex samples as f64 (re, im) pairs in storage order.
/// All values little endian. The grid center is not stored: it is the
/// concentration point of the trap at omega.
struct Snapshot {
  Field2D field;
  double a = 0.0;
  EffectivePotential eff;
};

/// Serialized bytes of a snapshot. Throws ConfigError when the grid is not
/// centered on the concentration point.
[[nodiscard]] std::string encode_snapshot(const Field2D& u, double a, const EffectivePotential& eff);
[[nodiscard]] Snapshot decode_snapshot(const std::string& bytes);

/// Writes through a temporary file and an atomic rename.
void write_snapshot(const std::filesystem::path& path, const Field2D& u, double a, const EffectivePotential& eff);
[[nodiscard]] Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace rotbec
