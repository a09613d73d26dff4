#pragma once

#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "zoo/base64.hpp"
#include "zoo/store.hpp"

namespace zoo {

// JSON archive blob exchanged by the HTTP package protocol.
inline nlohmann::json package_archive_json(const std::string& gid,
                                           const std::string& vid,
                                           const PackageFiles& files) {
  nlohmann::json fj = nlohmann::json::object();
  for (const auto& [name, bytes] : files) fj[name] = base64_encode(bytes);
  return {{"gid", gid}, {"vid", vid}, {"files", fj}};
}

inline PackageFiles package_files_from_archive(const nlohmann::json& j) {
  PackageFiles files;
  for (const auto& [name, b64] : j.at("files").items())
    files[name] = base64_decode(b64.get<std::string>());
  return files;
}

// Remote speaking the simple GET protocol:
//   GET /pkg/<gid>/latest  -> {"vid": "..."}
//   GET /pkg/<gid>/<vid>   -> archive blob
class HttpRemote : public RemoteSource {
 public:
  HttpRemote(std::string host, int port) : client_(host, port) {
    client_.set_connection_timeout(2, 0);
  }

  std::optional<std::string> latest_vid(const std::string& gid) override {
    auto res = client_.Get(("/pkg/" + gid + "/latest").c_str());
    if (!res) throw RemoteUnavailableError("cannot reach package server");
    if (res->status == 404) return std::nullopt;
    if (res->status != 200)
      throw RemoteUnavailableError("server returned status " +
                                   std::to_string(res->status));
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("vid"))
      throw RemoteUnavailableError("malformed latest response");
    return j.at("vid").get<std::string>();
  }

  std::optional<PackageFiles> fetch(const std::string& gid,
                                    const std::string& vid) override {
    auto res = client_.Get(("/pkg/" + gid + "/" + vid).c_str());
    if (!res) throw RemoteUnavailableError("cannot reach package server");
    if (res->status == 404) return std::nullopt;
    if (res->status != 200)
      throw RemoteUnavailableError("server returned status " +
                                   std::to_string(res->status));
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded())
      throw RemoteUnavailableError("malformed archive blob");
    return package_files_from_archive(j);
  }

 private:
  httplib::Client client_;
};

// Serves a RemoteSource (typically a DirRemote) over the GET protocol.
class PackageRemoteServer {
 public:
  explicit PackageRemoteServer(std::shared_ptr<RemoteSource> source)
      : source_(std::move(source)) {
    server_.Get(R"(/pkg/([a-z0-9]+)/latest)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  auto vid = source_->latest_vid(req.matches[1]);
                  if (!vid) {
                    res.status = 404;
                    return;
                  }
                  res.set_content(nlohmann::json{{"vid", *vid}}.dump(),
                                  "application/json");
                });
    server_.Get(R"(/pkg/([a-z0-9]+)/([A-Za-z0-9._-]+))",
                [this](const httplib::Request& req, httplib::Response& res) {
                  std::string gid = req.matches[1], vid = req.matches[2];
                  auto files = source_->fetch(gid, vid);
                  if (!files) {
                    res.status = 404;
                    return;
                  }
                  res.set_content(package_archive_json(gid, vid, *files).dump(),
                                  "application/json");
                });
  }

  ~PackageRemoteServer() { stop(); }

  int start(int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port("127.0.0.1")
                      : (server_.bind_to_port("127.0.0.1", port) ? port : -1);
    if (port_ <= 0) throw Error("cannot bind package server");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  // Blocks until the server is stopped; used by CLI serve commands.
  void wait() {
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

 private:
  std::shared_ptr<RemoteSource> source_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace zoo
