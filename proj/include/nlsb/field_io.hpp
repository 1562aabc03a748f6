#pragma once

#include <string>

#include "nlsb/grid.hpp"
#include "nlsb/radial.hpp"

namespace nlsb {

/// On-disk layout (little-endian): "NLSB", u32 version, u32 dim, u32 counts[dim],
/// f64 lo[dim], f64 hi[dim], f64 eps, f64 p, then ∏counts f64 values in row-major order.
struct FieldFile {
  ScalarField field;
  double eps = 0.0;
  double p = 0.0;
};

inline constexpr std::uint32_t kFieldFormatVersion = 1;

std::string encode_field(const ScalarField& u, double eps, double p);
FieldFile decode_field(const std::string& bytes);

void write_field(const std::string& path, const ScalarField& u, double eps, double p);
FieldFile read_field(const std::string& path);

/// A radial profile as a dim-1 field on [0, r_max] with eps = 1.
void write_profile(const std::string& path, const RadialProfile& profile);

/// Writes bytes to path atomically (temporary file plus rename).
void write_file(const std::string& path, const std::string& bytes);

}  // namespace nlsb
