#pragma once

// On-disk LPDO bundle.
//
// A bundle is a directory holding
//   manifest.json  {"format": "lpdo-bundle", "version": 1, "n_sites", "local_dim",
//                   "center" (int or null), "index_order": "s,left,right,kraus",
//                   "sites": [{"dims": [d, chi_l, chi_r, kappa], "offset", "count"}]}
//   sites.bin      concatenated site arrays; each value is two little-endian
//                  IEEE-754 doubles (re, im); within a site the physical index
//                  varies fastest, then left bond, right bond, kraus.
// Offsets and counts are in complex values. Round trips are bit-exact.

#include <filesystem>

#include "lpdo/chain.hpp"

namespace lpdo {

inline constexpr int kBundleVersion = 1;

/// Thrown for unreadable or unwritable bundle paths and malformed files.
class BundleError : public Error {
 public:
  using Error::Error;
};

void save_bundle(const LpdoChain& chain, const std::filesystem::path& dir);
LpdoChain load_bundle(const std::filesystem::path& dir);

}  // namespace lpdo
