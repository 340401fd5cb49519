#pragma once

#include <cstdint>
#include <string>

#include "veinforge/veinspace.hpp"

namespace vf {

// Model file wire format, little-endian, normative byte for byte:
//   "VQIF"                         4 bytes magic
//   version                        u32 = 1
//   M, N, K, T                     u32 each (T = template count)
//   tau, theta_vein, theta_id      f64 each
//   mean grid                      M*2N f64, row-major
//   eigenvalues                    K f64, descending
//   eigenveins                     K*2N f64, vector-major
//   templates                      T records of [u32 label length,
//                                  label bytes (UTF-8), K f64 weights]
// Total length is fully determined by the header and checked on load.
inline constexpr std::uint32_t kModelVersion = 1;

// Atomic: writes path + ".tmp" then renames over path.
void save_model(const VeinSpaceModel& model, const std::string& path);

// Validates magic, version, dims, and exact file length. The training image
// count is not stored; the loaded model reports dims.I = T.
VeinSpaceModel load_model(const std::string& path);

}  // namespace vf
