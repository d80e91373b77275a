#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

namespace gradlens::app {

/// Column-aligned plain text table. Numeric-looking cells are right-aligned.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    row.resize(header_.size());
    rows_.push_back(std::move(row));
  }

  void print(std::ostream& out, bool bold_header) const {
    std::vector<std::size_t> width(header_.size());
    for (std::size_t c = 0; c < header_.size(); ++c) {
      width[c] = header_[c].size();
      for (const auto& row : rows_) width[c] = std::max(width[c], row[c].size());
    }
    auto emit = [&](const std::vector<std::string>& row, bool header) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::string pad(width[c] - row[c].size(), ' ');
        bool right = !header && numeric(row[c]);
        line += right ? pad + row[c] : row[c] + (c + 1 < row.size() ? pad : "");
        if (c + 1 < row.size()) line += "  ";
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      if (header && bold_header)
        out << "\033[1m" << line << "\033[0m\n";
      else
        out << line << '\n';
    };
    emit(header_, true);
    for (const auto& row : rows_) emit(row, false);
  }

 private:
  static bool numeric(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
      return (ch >= '0' && ch <= '9') || ch == '.' || ch == '-' || ch == '+';
    });
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace gradlens::app
