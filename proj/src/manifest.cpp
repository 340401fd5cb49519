#include "veinforge/manifest.hpp"

#include <filesystem>
#include <fstream>

#include "veinforge/common.hpp"
#include "veinforge/raster.hpp"

namespace vf {

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Err::IoFailure, "load_manifest: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) raise(Err::IoFailure, "load_manifest: empty " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "filename,label")
    raise(Err::IoFailure, "load_manifest: bad header in " + path);

  std::vector<ManifestEntry> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size())
      raise(Err::IoFailure, "load_manifest: malformed row '" + line + "'");
    out.push_back({line.substr(0, comma), line.substr(comma + 1)});
  }
  return out;
}

Dataset load_dataset(const std::string& manifest_path,
                     const PipelineConfig* raw_cfg) {
  const std::filesystem::path base =
      std::filesystem::path(manifest_path).parent_path();
  Dataset out;
  for (const ManifestEntry& e : load_manifest(manifest_path)) {
    const GrayImage img = load_pgm((base / e.filename).string());
    BinaryImage skel =
        raw_cfg ? preprocess_pipeline(img, *raw_cfg) : to_binary(img);
    out.push_back({e.label, std::move(skel)});
  }
  return out;
}

}  // namespace vf
