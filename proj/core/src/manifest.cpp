#include "passby/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "passby/csv.hpp"
#include "passby/error.hpp"

namespace passby {

namespace {
const std::vector<std::string> kHeader = {"path", "vehicle_id", "speed_kmh",
                                          "t_cpa_s", "has_vehicle"};
}

std::vector<std::string> Manifest::vehicle_ids() const {
  std::set<std::string> ids;
  for (const auto& e : entries) {
    if (!e.annotation.vehicle_id.empty()) ids.insert(e.annotation.vehicle_id);
  }
  return {ids.begin(), ids.end()};
}

Manifest load_manifest(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw format_error("empty manifest: " + path.string());
  if (rows.front() != kHeader) {
    std::string expect;
    for (const auto& h : kHeader) expect += (expect.empty() ? "" : ",") + h;
    throw format_error("manifest header mismatch in " + path.string() +
                       " (expected '" + expect + "')");
  }

  const auto base = path.has_parent_path() ? path.parent_path()
                                           : std::filesystem::path(".");
  Manifest manifest;
  std::vector<std::string> problems;
  std::set<std::string> seen_paths;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    if (row.size() != kHeader.size()) {
      problems.push_back(where + ": expected " + std::to_string(kHeader.size()) +
                         " columns, got " + std::to_string(row.size()));
      continue;
    }
    ManifestEntry entry;
    ClipAnnotation& ann = entry.annotation;
    const std::string& raw_path = row[0];
    ann.vehicle_id = row[1];

    if (raw_path.empty()) {
      problems.push_back(where + ": empty path");
      continue;
    }
    if (!seen_paths.insert(raw_path).second) {
      problems.push_back(where + ": duplicate path '" + raw_path + "'");
      continue;
    }

    if (row[4] == "true") ann.has_vehicle = true;
    else if (row[4] == "false") ann.has_vehicle = false;
    else {
      problems.push_back(where + ": has_vehicle must be 'true' or 'false', got '" +
                         row[4] + "'");
      continue;
    }

    bool row_ok = true;
    auto parse_optional = [&](const std::string& text, const char* name)
        -> std::optional<double> {
      if (text.empty()) return std::nullopt;
      try {
        return csv::parse_double(text, where);
      } catch (const format_error&) {
        problems.push_back(where + ": invalid " + std::string(name) + " '" + text + "'");
        row_ok = false;
        return std::nullopt;
      }
    };
    ann.speed_kmh = parse_optional(row[2], "speed_kmh");
    ann.t_cpa_s = parse_optional(row[3], "t_cpa_s");
    if (!row_ok) continue;

    if (ann.has_vehicle) {
      if (!ann.speed_kmh || !ann.t_cpa_s) {
        problems.push_back(where + ": has_vehicle=true requires speed_kmh and t_cpa_s");
        continue;
      }
      if (*ann.speed_kmh <= 0) {
        problems.push_back(where + ": speed_kmh must be positive");
        continue;
      }
      if (*ann.t_cpa_s < 0) {
        problems.push_back(where + ": t_cpa_s must be nonnegative");
        continue;
      }
    } else if (ann.speed_kmh || ann.t_cpa_s) {
      problems.push_back(where + ": has_vehicle=false forbids speed_kmh and t_cpa_s");
      continue;
    }

    std::filesystem::path p(raw_path);
    entry.path = p.is_absolute() ? p : base / p;
    manifest.entries.push_back(std::move(entry));
  }

  if (!problems.empty()) {
    std::string msg = "invalid manifest " + path.string() + ":";
    for (const auto& p : problems) msg += "\n  " + p;
    throw validation_error(msg);
  }
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  csv::write_row(out, kHeader);
  for (const auto& e : manifest.entries) {
    const auto& ann = e.annotation;
    csv::write_row(out, {e.path.generic_string(), ann.vehicle_id,
                         ann.speed_kmh ? csv::format_double(*ann.speed_kmh) : "",
                         ann.t_cpa_s ? csv::format_double(*ann.t_cpa_s) : "",
                         ann.has_vehicle ? "true" : "false"});
  }
  if (!out) throw io_error("write failed for " + path.string());
}

}  // namespace passby
