#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "gradlens/dataset.hpp"
#include "requests.hpp"

namespace httplib {
class Server;
}

namespace gradlens::app {

struct ApiResponse {
  int status = 200;
  std::string body;
};

/// HTTP status for a library error: caller faults are 4xx, the rest 500.
int status_for(ErrorKind kind) noexcept;

/// Read-only JSON API over one immutable dataset snapshot. handle() is the
/// whole request path minus the socket, so it can be exercised directly.
class ApiService {
 public:
  explicit ApiService(Dataset dataset, std::optional<std::string> cors_origin = std::nullopt);

  const Dataset& dataset() const noexcept { return dataset_; }

  /// `path` like "/api/series"; params already decoded.
  ApiResponse handle(std::string_view path, const Params& params) const;

  /// Registers the GET routes on `server`.
  void mount(httplib::Server& server) const;

 private:
  Dataset dataset_;
  std::optional<std::string> cors_origin_;
};

/// Loads the dataset (refusing to start on a corrupt manifest), binds and
/// serves until SIGINT/SIGTERM. Returns a process exit status.
int serve(const std::filesystem::path& dataset_dir, const std::string& host, int port,
          std::optional<std::string> cors_origin, std::ostream& log);

}  // namespace gradlens::app
