#include "lpdo/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace lpdo {

namespace {

using json = nlohmann::json;

void put_le(std::ostream& os, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int j = 0; j < 8; ++j) bytes[j] = static_cast<unsigned char>((bits >> (8 * j)) & 0xffu);
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int j = 0; j < 8; ++j) bits |= static_cast<std::uint64_t>(bytes[j]) << (8 * j);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_bundle(const LpdoChain& chain, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw BundleError("cannot create bundle directory " + dir.string() + ": " + ec.message());

  json manifest;
  manifest["format"] = "lpdo-bundle";
  manifest["version"] = kBundleVersion;
  manifest["n_sites"] = chain.size();
  manifest["local_dim"] = chain.local_dim();
  manifest["center"] = chain.center() ? json(*chain.center()) : json(nullptr);
  manifest["index_order"] = "s,left,right,kraus";
  manifest["sites"] = json::array();

  std::ofstream bin(dir / "sites.bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw BundleError("cannot write " + (dir / "sites.bin").string());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& t = chain.site(i);
    json entry;
    entry["dims"] = {t.index(0).dim, t.index(1).dim, t.index(2).dim, t.index(3).dim};
    entry["offset"] = offset;
    entry["count"] = t.size();
    manifest["sites"].push_back(entry);
    for (const auto& v : t.data()) {
      put_le(bin, v.real());
      put_le(bin, v.imag());
    }
    offset += t.size();
  }
  if (!bin) throw BundleError("write failed for " + (dir / "sites.bin").string());

  std::ofstream man(dir / "manifest.json", std::ios::trunc);
  if (!man) throw BundleError("cannot write " + (dir / "manifest.json").string());
  man << manifest.dump(2) << '\n';
  if (!man) throw BundleError("write failed for " + (dir / "manifest.json").string());
}

LpdoChain load_bundle(const std::filesystem::path& dir) {
  std::ifstream man(dir / "manifest.json");
  if (!man) throw BundleError("cannot read " + (dir / "manifest.json").string());
  json manifest;
  try {
    man >> manifest;
  } catch (const json::exception& e) {
    throw BundleError("malformed manifest in " + dir.string() + ": " + e.what());
  }
  if (manifest.value("format", "") != "lpdo-bundle")
    throw BundleError(dir.string() + " is not an lpdo bundle");
  if (manifest.value("version", 0) != kBundleVersion)
    throw BundleError("unsupported bundle version in " + dir.string());

  std::ifstream bin(dir / "sites.bin", std::ios::binary);
  if (!bin) throw BundleError("cannot read " + (dir / "sites.bin").string());
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(bin)),
                                 std::istreambuf_iterator<char>());

  try {
    const auto n = manifest.at("n_sites").get<std::size_t>();
    const auto local_dim = manifest.at("local_dim").get<std::int64_t>();
    const auto& entries = manifest.at("sites");
    if (entries.size() != n) throw BundleError("site count mismatch in " + dir.string());

    std::vector<Index> bonds;
    std::vector<DenseTensor> sites;
    for (std::size_t i = 0; i < n; ++i) {
      const auto dims = entries[i].at("dims").get<std::vector<std::int64_t>>();
      const auto offset = entries[i].at("offset").get<std::size_t>();
      const auto count = entries[i].at("count").get<std::size_t>();
      if (dims.size() != 4) throw BundleError("site dims must have 4 entries");
      if ((offset + count) * 16 > raw.size()) throw BundleError("sites.bin is truncated");
      if (i == 0) bonds.push_back(Index::make(dims[1], IndexRole::bond));
      if (bonds.back().dim != dims[1]) throw BundleError("bond dims disagree between sites");
      bonds.push_back(Index::make(dims[2], IndexRole::bond));
      std::vector<cplx> data(count);
      for (std::size_t j = 0; j < count; ++j) {
        const unsigned char* p = raw.data() + 16 * (offset + j);
        data[j] = cplx(get_le(p), get_le(p + 8));
      }
      sites.push_back(make_site(Index::make(dims[0], IndexRole::physical), bonds[i],
                                bonds[i + 1], Index::make(dims[3], IndexRole::kraus),
                                std::move(data)));
    }
    std::optional<std::size_t> center;
    if (!manifest.at("center").is_null()) center = manifest.at("center").get<std::size_t>();
    return LpdoChain(std::move(sites), center, local_dim);
  } catch (const json::exception& e) {
    throw BundleError("malformed manifest in " + dir.string() + ": " + e.what());
  } catch (const DimensionError& e) {
    throw BundleError("inconsistent bundle " + dir.string() + ": " + e.what());
  }
}

}  // namespace lpdo
