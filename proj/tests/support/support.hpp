#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "gradlens/dataset.hpp"
#include "gradlens/ingest.hpp"

namespace gradlens::testing {

inline std::filesystem::path fixture_dir() { return GRADLENS_FIXTURE_DIR; }
inline std::filesystem::path fixture(const std::string& relative) { return fixture_dir() / relative; }

/// Directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gradlens-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Ingests a checked-in canonical fixture into `dir/<name>` and opens it.
inline Dataset load_fixture(const TempDir& dir, const std::string& name) {
  const auto target = dir / name;
  ingest_canonical(target, fixture(name + "/records.csv"));
  if (std::filesystem::exists(fixture(name + "/names.csv")))
    import_institution_names(target, fixture(name + "/names.csv"));
  return Dataset::open(target);
}

/// Result of running the gradlens executable.
struct CommandResult {
  int status = -1;
  std::string out;
};

/// Runs the built CLI with the given shell-quoted argument string; stderr is discarded.
inline CommandResult run_gradlens(const std::string& args) {
  const std::string command = std::string("'") + GRADLENS_CLI_PATH + "' " + args + " 2>/dev/null";
  CommandResult result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
  const int raw = ::pclose(pipe);
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

/// Random counts over n categories with at least one nonzero entry.
inline std::vector<std::uint64_t> random_counts(std::mt19937_64& rng, std::size_t n,
                                                std::uint64_t max_count = 1000) {
  std::uniform_int_distribution<std::uint64_t> count(0, max_count);
  std::bernoulli_distribution zero(0.2);
  std::vector<std::uint64_t> out(n);
  do {
    for (auto& c : out) c = zero(rng) ? 0 : count(rng);
  } while (std::all_of(out.begin(), out.end(), [](auto c) { return c == 0; }));
  return out;
}

}  // namespace gradlens::testing
