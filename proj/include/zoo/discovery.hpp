#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "zoo/errors.hpp"
#include "zoo/store.hpp"
#include "zoo/types.hpp"

namespace zoo {

// Public record of a published service (§ the registry every publish lands
// in): what it is, its arrow type, and where to reach it.
struct DiscoveryRecord {
  std::int64_t id = 0;
  std::string gist_id;
  std::string description;
  std::string type_string;
  std::string uri;
  std::int64_t published_at = 0;

  void validate(const TypeRegistry& reg = TypeRegistry::global()) const {
    try {
      parse_type_string(type_string, reg);
    } catch (const Error& e) {
      throw InvalidTypeStringError(e.what());
    }
    if (uri.empty()) throw InvalidTypeStringError("uri must be non-empty");
  }

  nlohmann::json to_json() const {
    return {{"id", id},
            {"gist_id", gist_id},
            {"description", description},
            {"type_string", type_string},
            {"uri", uri},
            {"published_at", published_at}};
  }

  static DiscoveryRecord from_json(const nlohmann::json& j) {
    DiscoveryRecord r;
    r.id = j.value("id", std::int64_t(0));
    r.gist_id = j.value("gist_id", std::string());
    r.description = j.value("description", std::string());
    r.type_string = j.value("type_string", std::string());
    r.uri = j.value("uri", std::string());
    r.published_at = j.value("published_at", std::int64_t(0));
    return r;
  }
};

struct SearchQuery {
  std::optional<DataType> input;
  std::optional<DataType> output;
  std::optional<std::string> text;
};

// Append-log backed registry with an in-memory index. The log is compacted
// on startup (duplicate (gist_id, uri) lines collapse to the first id).
class ServiceRegistry {
 public:
  explicit ServiceRegistry(std::filesystem::path log_file)
      : log_file_(std::move(log_file)) {
    load();
  }

  std::int64_t register_record(DiscoveryRecord rec, std::int64_t now = 0) {
    rec.validate();
    std::lock_guard lock(mu_);
    auto key = std::make_pair(rec.gist_id, rec.uri);
    if (auto it = index_.find(key); it != index_.end()) return it->second;

    rec.id = next_id_++;
    if (rec.published_at == 0) rec.published_at = now;
    append_line(rec);
    index_[key] = rec.id;
    records_.push_back(std::move(rec));
    return records_.back().id;
  }

  DiscoveryRecord get(std::int64_t id) const {
    std::lock_guard lock(mu_);
    for (const auto& r : records_)
      if (r.id == id) return r;
    throw RecordNotFoundError(id);
  }

  // Conjunction of the supplied predicates; newest first.
  std::vector<DiscoveryRecord> search(const SearchQuery& q) const {
    std::lock_guard lock(mu_);
    std::vector<DiscoveryRecord> out;
    for (const auto& r : records_) {
      ServiceSignature sig = parse_type_string(r.type_string);
      if (q.input &&
          std::find(sig.inputs.begin(), sig.inputs.end(), *q.input) ==
              sig.inputs.end())
        continue;
      if (q.output && !(sig.output == *q.output)) continue;
      if (q.text && r.description.find(*q.text) == std::string::npos) continue;
      out.push_back(r);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const DiscoveryRecord& a, const DiscoveryRecord& b) {
                       if (a.published_at != b.published_at)
                         return a.published_at > b.published_at;
                       return a.id > b.id;
                     });
    return out;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

 private:
  void load() {
    records_.clear();
    index_.clear();
    next_id_ = 1;
    if (!std::filesystem::exists(log_file_)) return;

    std::ifstream in(log_file_);
    if (!in) throw StorageError("cannot open " + log_file_.string());
    std::string line;
    std::size_t total_lines = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ++total_lines;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      DiscoveryRecord r = DiscoveryRecord::from_json(j);
      auto key = std::make_pair(r.gist_id, r.uri);
      if (index_.count(key)) continue;
      index_[key] = r.id;
      next_id_ = std::max(next_id_, r.id + 1);
      records_.push_back(std::move(r));
    }
    if (total_lines != records_.size()) compact();
  }

  void compact() {
    std::string tmp = log_file_.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw StorageError("cannot write " + tmp);
      for (const auto& r : records_) out << r.to_json().dump() << "\n";
    }
    std::error_code ec;
    std::filesystem::rename(tmp, log_file_, ec);
    if (ec) throw StorageError("compaction rename failed");
  }

  void append_line(const DiscoveryRecord& r) {
    std::error_code ec;
    if (log_file_.has_parent_path())
      std::filesystem::create_directories(log_file_.parent_path(), ec);
    std::ofstream out(log_file_, std::ios::app);
    if (!out) throw StorageError("cannot append to " + log_file_.string());
    out << r.to_json().dump() << "\n";
    if (!out) throw StorageError("short append to " + log_file_.string());
  }

  std::filesystem::path log_file_;
  mutable std::mutex mu_;
  std::vector<DiscoveryRecord> records_;
  std::map<std::pair<std::string, std::string>, std::int64_t> index_;
  std::int64_t next_id_ = 1;
};

namespace detail {

inline std::optional<DataType> parse_type_param(const httplib::Request& req,
                                                const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  auto token = req.get_param_value(name);
  auto t = TypeRegistry::global().parse_token(token);
  if (!t) throw InvalidTypeStringError("unknown type token \"" + token + "\"");
  return t;
}

}  // namespace detail

// HTTP face of the registry:
//   POST /records        -> {"id": n}
//   GET  /records?output=fr_text&input=png_img&q=style
//   GET  /records/<id>
class RegistryServer {
 public:
  explicit RegistryServer(ServiceRegistry& registry, std::int64_t now = 0)
      : registry_(registry), now_(now) {
    server_.Post("/records", [this](const httplib::Request& req,
                                    httplib::Response& res) {
      auto j = nlohmann::json::parse(req.body, nullptr, false);
      if (j.is_discarded()) {
        res.status = 400;
        res.set_content(R"({"error":"body must be a JSON record"})",
                        "application/json");
        return;
      }
      try {
        auto id = registry_.register_record(DiscoveryRecord::from_json(j), now_);
        res.set_content(nlohmann::json{{"id", id}}.dump(), "application/json");
      } catch (const Error& e) {
        res.status = 400;
        res.set_content(nlohmann::json{{"error", e.what()}}.dump(),
                        "application/json");
      }
    });

    server_.Get("/records/(\\d+)", [this](const httplib::Request& req,
                                          httplib::Response& res) {
      try {
        auto rec = registry_.get(std::stoll(req.matches[1]));
        res.set_content(rec.to_json().dump(), "application/json");
      } catch (const RecordNotFoundError& e) {
        res.status = 404;
        res.set_content(nlohmann::json{{"error", e.what()}}.dump(),
                        "application/json");
      }
    });

    server_.Get("/records", [this](const httplib::Request& req,
                                   httplib::Response& res) {
      try {
        SearchQuery q;
        q.input = detail::parse_type_param(req, "input");
        q.output = detail::parse_type_param(req, "output");
        if (req.has_param("q")) q.text = req.get_param_value("q");
        nlohmann::json out = nlohmann::json::array();
        for (const auto& r : registry_.search(q)) out.push_back(r.to_json());
        res.set_content(out.dump(), "application/json");
      } catch (const Error& e) {
        res.status = 400;
        res.set_content(nlohmann::json{{"error", e.what()}}.dump(),
                        "application/json");
      }
    });
  }

  ~RegistryServer() { stop(); }

  int start(int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port("127.0.0.1")
                      : (server_.bind_to_port("0.0.0.0", port) ? port : -1);
    if (port_ <= 0) throw Error("cannot bind registry server");
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
  ServiceRegistry& registry_;
  std::int64_t now_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

// Thin client over the registry HTTP API.
class DiscoveryClient {
 public:
  DiscoveryClient(std::string host, int port) : client_(host, port) {}

  explicit DiscoveryClient(const std::string& url) : client_(url.c_str()) {}

  std::int64_t register_record(const DiscoveryRecord& rec) {
    auto res = client_.Post("/records", rec.to_json().dump(), "application/json");
    if (!res) throw StorageError("cannot reach registry");
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (res->status != 200)
      throw StorageError(j.is_discarded() ? "registry error"
                                          : j.value("error", "registry error"));
    return j.at("id").get<std::int64_t>();
  }

  std::vector<DiscoveryRecord> search(
      const std::optional<std::string>& input_token,
      const std::optional<std::string>& output_token,
      const std::optional<std::string>& text) {
    httplib::Params params;
    if (input_token) params.emplace("input", *input_token);
    if (output_token) params.emplace("output", *output_token);
    if (text) params.emplace("q", *text);
    auto res = client_.Get("/records", params, httplib::Headers());
    if (!res) throw StorageError("cannot reach registry");
    if (res->status != 200) throw StorageError("registry returned status " +
                                               std::to_string(res->status));
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.is_array())
      throw StorageError("malformed search response");
    std::vector<DiscoveryRecord> out;
    for (const auto& item : j) out.push_back(DiscoveryRecord::from_json(item));
    return out;
  }

 private:
  httplib::Client client_;
};

}  // namespace zoo
