#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gradlens/dataset.hpp"

namespace gradlens::detail {

struct CanonicalParse {
  std::vector<DegreeRecord> records;
  std::size_t rows = 0;
  std::size_t skipped_extras = 0;  // rows in Nonresident/Unknown when the scheme leaves them out
};

/// Parses canonical CSV text against `scheme`. Errors carry "line N" context.
CanonicalParse parse_canonical(std::string_view text, const CategoryScheme& scheme,
                               std::string_view source);

/// Sorts into canonical order and sums records sharing a key. Returns the
/// number of keys that were merged.
std::size_t merge_records(std::vector<DegreeRecord>& records, const CategoryScheme& scheme);

/// Rebuilds the derived manifest fields (years, counts, digest) from records.
void refresh_manifest(DatasetManifest& manifest, const std::vector<DegreeRecord>& records,
                      const std::string& records_csv);

/// Writes records.csv and manifest.json via temp files + rename.
void write_store(const std::filesystem::path& dir, const DatasetManifest& manifest,
                 const std::string& records_csv);

}  // namespace gradlens::detail
