#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace passby {

// Ground-truth labels attached to one clip. Speed and CPA instant are present
// exactly when a vehicle is present.
struct ClipAnnotation {
  bool has_vehicle = false;
  std::optional<double> speed_kmh;
  std::optional<double> t_cpa_s;
  std::string vehicle_id;
};

struct ManifestEntry {
  std::filesystem::path path;
  ClipAnnotation annotation;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::vector<std::string> vehicle_ids() const;  // sorted, unique, non-empty ids
};

// CSV schema: `path,vehicle_id,speed_kmh,t_cpa_s,has_vehicle`, UTF-8, '.'
// decimal point. Relative clip paths are resolved against the manifest's
// parent directory on load. Every invalid row is reported, not just the first.
Manifest load_manifest(const std::filesystem::path& path);

// Writes entries as-is (no path rewriting).
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace passby
