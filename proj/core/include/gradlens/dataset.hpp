#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradlens/records.hpp"
#include "gradlens/scheme.hpp"
#include "gradlens/tables.hpp"

namespace gradlens {

struct SourceDigest {
  std::string file;    // file name as given at ingest
  std::string sha256;  // of the raw bytes
  std::string kind;    // "raw" or "canonical"
  std::size_t rows = 0;
  std::size_t records = 0;
  std::uint64_t total = 0;  // graduates contributed

  friend bool operator==(const SourceDigest&, const SourceDigest&) = default;
};

/// Options fixed when a dataset is first created.
struct IngestPolicy {
  bool include_second_majors = false;
  ExtraCategories extras;

  friend bool operator==(const IngestPolicy&, const IngestPolicy&) = default;
};

struct DatasetManifest {
  std::string name;
  std::optional<YearRange> years;
  std::size_t institutions = 0;
  std::size_t records = 0;
  std::uint64_t total = 0;
  CategoryScheme scheme = CategoryScheme::ipeds_default();
  IngestPolicy policy;
  std::vector<SourceDigest> sources;
  std::string records_sha256;

  std::string to_json() const;
  /// Throws ManifestCorrupt on unparsable or incomplete manifests.
  static DatasetManifest from_json(std::string_view text);

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct QueryResult {
  std::vector<DegreeRecord> records;
  std::vector<std::string> warnings;
};

/// Immutable snapshot of a dataset: records in canonical order plus the
/// manifest describing them. Safe to share across threads.
class Dataset {
 public:
  static constexpr const char* kRecordsFile = "records.csv";
  static constexpr const char* kManifestFile = "manifest.json";
  static constexpr const char* kNamesFile = "institutions.csv";

  /// Loads a dataset directory and checks the records digest against the
  /// manifest (ManifestCorrupt on any inconsistency).
  static Dataset open(const std::filesystem::path& dir);

  /// In-memory dataset; duplicate keys are summed.
  static Dataset from_records(CategoryScheme scheme, std::vector<DegreeRecord> records,
                              std::string name = "memory");

  const DatasetManifest& manifest() const noexcept { return manifest_; }
  const CategoryScheme& scheme() const noexcept { return manifest_.scheme; }
  std::span<const DegreeRecord> records() const noexcept { return records_; }

  /// sha256 of the manifest text; changes whenever the snapshot changes.
  const std::string& digest() const noexcept { return digest_; }

  std::vector<std::string> institutions() const;
  bool has_institution(std::string_view id) const;
  std::optional<std::string> institution_name(std::string_view id) const;
  std::optional<YearRange> institution_years(std::string_view id) const;

  /// Matching records in canonical order. Unknown institutions produce a
  /// warning, not an error.
  QueryResult query(const RecordFilter& filter) const;

  /// aggregate() over the records matching `filter`.
  CountTable table(const RecordFilter& filter) const;

 private:
  Dataset(DatasetManifest manifest, std::vector<DegreeRecord> records,
          std::map<std::string, std::string, std::less<>> names);
  void build_index();

  DatasetManifest manifest_;
  std::vector<DegreeRecord> records_;
  std::map<std::string, std::string, std::less<>> names_;
  // institution -> [begin, end) into records_ (records are sorted by institution)
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> index_;
  std::map<std::string, YearRange, std::less<>> year_spans_;
  std::string digest_;
};

/// Canonical long-format CSV header.
inline constexpr std::string_view kCanonicalHeader =
    "institution_id,year,cip_family,award_level,gender,race,count";

std::string to_canonical_csv(std::span<const DegreeRecord> records);

}  // namespace gradlens
