#include "api_service.hpp"

#include <pthread.h>
#include <signal.h>

#include <ostream>
#include <thread>

#include <httplib.h>

namespace gradlens::app {
namespace {

using nlohmann::json;

ApiResponse error_response(int status, std::string_view name, std::string_view message,
                           std::string_view parameter, std::string_view context = {}) {
  json body{{"status", status},
            {"error", name},
            {"message", message},
            {"parameter", parameter.empty() ? json(nullptr) : json(parameter)}};
  if (!context.empty()) body["context"] = context;
  return {status, dump_body(body)};
}

}  // namespace

int status_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnknownInstitution: return 404;
    case ErrorKind::EmptyCohort:
    case ErrorKind::ZeroPopulation: return 422;
    case ErrorKind::UnknownGroup:
    case ErrorKind::InvalidFilter:
    case ErrorKind::EmptyRange:
    case ErrorKind::CategoryMismatch:
    case ErrorKind::DegenerateK:
    case ErrorKind::InvalidDistribution:
    case ErrorKind::SchemeMismatch: return 400;
    default: return 500;
  }
}

ApiService::ApiService(Dataset dataset, std::optional<std::string> cors_origin)
    : dataset_(std::move(dataset)), cors_origin_(std::move(cors_origin)) {}

ApiResponse ApiService::handle(std::string_view path, const Params& params) const {
  constexpr std::string_view prefix = "/api/";
  auto endpoint = path.starts_with(prefix) ? parse_endpoint(path.substr(prefix.size()))
                                           : std::nullopt;
  if (!endpoint)
    return error_response(404, "unknown_endpoint", "no such endpoint", {}, path);
  try {
    return {200, dump_body(run_endpoint(dataset_, *endpoint, params))};
  } catch (const ParamError& e) {
    return error_response(400, e.name(), e.what(), e.parameter());
  } catch (const ParamDataError& e) {
    return error_response(status_for(e.kind()), e.name(), e.what(), e.parameter(), e.context());
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), e.name(), e.what(), {}, e.context());
  } catch (const std::exception& e) {
    return error_response(500, "internal_error", e.what(), {});
  }
}

void ApiService::mount(httplib::Server& server) const {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    Params params;
    ApiResponse response;
    bool duplicate = false;
    for (const auto& [name, value] : req.params) {
      auto [it, inserted] = params.emplace(name, value);
      if (inserted) continue;
      if (name == "metric" || name == "institution") {
        it->second += name == "metric" ? ";" : ",";
        it->second += value;
      } else {
        response = error_response(400, "duplicate_parameter", "parameter given twice", name);
        duplicate = true;
      }
    }
    if (!duplicate) response = handle(req.path, params);
    res.status = response.status;
    if (cors_origin_) res.set_header("Access-Control-Allow-Origin", *cors_origin_);
    res.set_header("X-Dataset-Digest", dataset_.digest());
    res.set_content(response.body, "application/json; charset=utf-8");
  };
  server.Get(R"(/api/[a-z]+)", handler);
}

int serve(const std::filesystem::path& dataset_dir, const std::string& host, int port,
          std::optional<std::string> cors_origin, std::ostream& log) {
  // Block the shutdown signals before any thread starts so that only the
  // sigwait below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ApiService service(Dataset::open(dataset_dir), std::move(cors_origin));
  httplib::Server server;
  service.mount(server);
  if (!server.bind_to_port(host, port)) {
    log << "error: bind_failed: cannot listen on " << host << ':' << port << '\n';
    return 2;
  }
  log << "serving " << service.dataset().manifest().name << " (" << service.dataset().digest().substr(0, 12)
      << ") on http://" << host << ':' << port << std::endl;
  std::thread listener([&] { server.listen_after_bind(); });
  int received = 0;
  sigwait(&signals, &received);
  log << "signal " << received << ", shutting down" << std::endl;
  server.stop();
  listener.join();
  return 0;
}

}  // namespace gradlens::app
