#pragma once

#include <string>
#include <vector>

#include "veinforge/evaluation.hpp"
#include "veinforge/preprocess.hpp"

namespace vf {

struct ManifestEntry {
  std::string filename;  // relative to the manifest's directory
  std::string label;
};

// Reads a "filename,label" CSV. Fails with IoFailure on a missing file, a
// wrong header, or a malformed row.
std::vector<ManifestEntry> load_manifest(const std::string& path);

// Loads every listed image. With raw_cfg null the files are skeleton images
// (any nonzero pixel is foreground); otherwise each is pushed through the
// preprocessing pipeline first.
Dataset load_dataset(const std::string& manifest_path,
                     const PipelineConfig* raw_cfg = nullptr);

}  // namespace vf
