#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zoo/errors.hpp"
#include "zoo/graph.hpp"
#include "zoo/sha256.hpp"
#include "zoo/version.hpp"

namespace zoo {

// File name -> raw bytes. std::map keeps names sorted, which makes the
// content hash canonical.
using PackageFiles = std::map<std::string, std::string>;

inline const char* kConfigFileName = "zoo.json";

// Canonical byte string hashed for content addressing: each file as
// name NUL length(8-byte LE) bytes, in name order.
inline std::string canonical_package_bytes(const PackageFiles& files) {
  std::string out;
  for (const auto& [name, bytes] : files) {
    out += name;
    out.push_back('\0');
    std::uint64_t len = bytes.size();
    for (int i = 0; i < 8; ++i)
      out.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
    out += bytes;
  }
  return out;
}

inline std::string content_hash(const PackageFiles& files) {
  return sha256_hex(canonical_package_bytes(files));
}

struct PackageManifest {
  std::string gid;
  std::string vid;
  PackageFiles files;
  std::int64_t fetched_at = 0;
  std::optional<DependencyGraph> dependency_graph;

  bool has_config() const { return files.count(kConfigFileName) > 0; }

  nlohmann::json config() const {
    auto it = files.find(kConfigFileName);
    if (it == files.end()) throw ConfigMissingError(gid, vid);
    nlohmann::json j = nlohmann::json::parse(it->second, nullptr, false);
    if (j.is_discarded()) throw ConfigParseError("not valid JSON");
    return j;
  }
};

struct CacheMeta {
  std::string latest_vid;
  std::int64_t latest_downloaded_at = 0;
  std::int64_t ttl_seconds = 600;
  std::int64_t publish_counter = 0;
};

// Where packages come from when the local cache misses. Implementations
// throw RemoteUnavailableError when the source cannot be reached; nullopt
// means reachable but no such package.
class RemoteSource {
 public:
  virtual ~RemoteSource() = default;
  virtual std::optional<std::string> latest_vid(const std::string& gid) = 0;
  virtual std::optional<PackageFiles> fetch(const std::string& gid,
                                            const std::string& vid) = 0;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file_atomic(const std::filesystem::path& p,
                              const std::string& bytes) {
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreWriteError("cannot open " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw StoreWriteError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p, ec);
  if (ec) throw StoreWriteError("rename failed for " + p.string());
}

}  // namespace detail

// Directory-tree remote: <root>/<gid>/<vid>/files/* with a latest.txt marker
// per gid. Used by tests as a scriptable fake Gist server.
class DirRemote : public RemoteSource {
 public:
  explicit DirRemote(std::filesystem::path root) : root_(std::move(root)) {}

  std::optional<std::string> latest_vid(const std::string& gid) override {
    check_reachable();
    auto marker = root_ / gid / "latest.txt";
    if (!std::filesystem::exists(marker)) return std::nullopt;
    std::string vid = detail::read_file(marker);
    while (!vid.empty() && (vid.back() == '\n' || vid.back() == '\r'))
      vid.pop_back();
    return vid;
  }

  std::optional<PackageFiles> fetch(const std::string& gid,
                                    const std::string& vid) override {
    check_reachable();
    auto dir = root_ / gid / vid / "files";
    if (!std::filesystem::is_directory(dir)) return std::nullopt;
    PackageFiles files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file())
        files[entry.path().filename().string()] =
            detail::read_file(entry.path());
    return files;
  }

  // Test hook: add a version and advance the latest marker.
  void push_version(const std::string& gid, const std::string& vid,
                    const PackageFiles& files) {
    for (const auto& [name, bytes] : files)
      detail::write_file_atomic(root_ / gid / vid / "files" / name, bytes);
    detail::write_file_atomic(root_ / gid / "latest.txt", vid);
  }

 private:
  void check_reachable() const {
    if (!std::filesystem::is_directory(root_))
      throw RemoteUnavailableError("no such directory: " + root_.string());
  }

  std::filesystem::path root_;
};

// Local package store with TTL-refreshed "latest" resolution.
//
// Layout: <root>/<gid>/<vid>/files/*         package payload
//         <root>/<gid>/<vid>/manifest.json   {gid, vid, fetched_at}
//         <root>/<gid>/<vid>/graph.json      pinned dependency graph
//         <root>/<gid>/meta.json             CacheMeta
class PackageStore {
 public:
  explicit PackageStore(std::filesystem::path root,
                        std::shared_ptr<RemoteSource> remote = nullptr,
                        std::int64_t default_ttl_seconds = 600)
      : root_(std::move(root)),
        remote_(std::move(remote)),
        default_ttl_(default_ttl_seconds) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
  }

  const std::filesystem::path& root() const { return root_; }
  void set_read_only(bool ro) { read_only_ = ro; }
  void set_remote(std::shared_ptr<RemoteSource> remote) {
    remote_ = std::move(remote);
  }

  bool has_version(const std::string& gid, const std::string& vid) const {
    return std::filesystem::is_directory(root_ / gid / vid / "files");
  }

  PackageManifest resolve(const VersionRef& ref, std::int64_t now) {
    if (ref.pin && ref.is_latest()) throw PinOnLatestError(ref.gid);

    PackageManifest m =
        ref.is_latest() ? resolve_latest(ref.gid, now) : resolve_explicit(ref.gid, *ref.vid, now);

    if (ref.pin) {
      auto graph_path = root_ / m.gid / m.vid / "graph.json";
      if (std::filesystem::exists(graph_path))
        m.dependency_graph = DependencyGraph::from_json(
            nlohmann::json::parse(detail::read_file(graph_path)));
    }
    return m;
  }

  // Stores the files under a fresh content-addressed version id and returns
  // the explicit reference. Identical content re-published keeps the same
  // hash prefix but gets a new monotone counter suffix.
  VersionRef publish_package(const PackageFiles& files,
                             std::optional<std::string> gid = std::nullopt,
                             bool service_package = true,
                             std::int64_t now = 0) {
    if (read_only_) throw StoreWriteError("store is read-only");
    if (files.empty()) throw InvalidConfigError("package has no files");
    if (service_package) {
      auto it = files.find(kConfigFileName);
      if (it == files.end())
        throw InvalidConfigError("service package lacks zoo.json");
      nlohmann::json j = nlohmann::json::parse(it->second, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw InvalidConfigError("zoo.json is not a JSON object");
    }

    std::lock_guard lock(write_mu_);
    std::string hash = content_hash(files);
    std::string use_gid = gid.value_or(hash.substr(0, 5));
    if (!VersionRef::valid_gid(use_gid)) throw InvalidRefError(use_gid);

    CacheMeta meta = load_meta(use_gid);
    std::int64_t counter = next_counter(use_gid, meta);
    std::string vid = hash.substr(0, 10) + "-" + std::to_string(counter);

    write_version(use_gid, vid, files, now);
    meta.publish_counter = counter;
    meta.latest_vid = vid;
    meta.latest_downloaded_at = now;
    save_meta(use_gid, meta);

    VersionRef ref;
    ref.gid = use_gid;
    ref.vid = vid;
    return ref;
  }

  void save_dependency_graph(const VersionRef& ref,
                             const DependencyGraph& graph) {
    if (ref.is_latest()) throw PinOnLatestError(ref.gid);
    if (read_only_) throw StoreWriteError("store is read-only");
    if (!has_version(ref.gid, *ref.vid))
      throw PackageNotFoundError(ref.gid, *ref.vid);
    std::lock_guard lock(write_mu_);
    detail::write_file_atomic(root_ / ref.gid / *ref.vid / "graph.json",
                              graph.to_json().dump(2));
  }

  DependencyGraph load_dependency_graph(const VersionRef& ref) const {
    if (ref.is_latest()) throw PinOnLatestError(ref.gid);
    auto path = root_ / ref.gid / *ref.vid / "graph.json";
    if (!std::filesystem::exists(path))
      throw GraphMissingError(ref.gid, *ref.vid);
    return DependencyGraph::from_json(
        nlohmann::json::parse(detail::read_file(path)));
  }

  CacheMeta meta(const std::string& gid) const { return load_meta(gid); }

 private:
  PackageManifest resolve_explicit(const std::string& gid,
                                   const std::string& vid, std::int64_t now) {
    if (has_version(gid, vid)) return load_version(gid, vid);
    auto files = remote_fetch(gid, vid);
    if (!files) throw PackageNotFoundError(gid, vid);
    std::lock_guard lock(write_mu_);
    write_version(gid, vid, *files, now);
    return load_version(gid, vid);
  }

  PackageManifest resolve_latest(const std::string& gid, std::int64_t now) {
    CacheMeta meta = load_meta(gid);
    bool fresh = !meta.latest_vid.empty() &&
                 (now - meta.latest_downloaded_at) < meta.ttl_seconds &&
                 has_version(gid, meta.latest_vid);
    if (fresh) return load_version(gid, meta.latest_vid);

    if (!remote_)
      throw RemoteUnavailableError("no remote source configured to fetch " +
                                   gid + "/latest");
    auto vid = remote_->latest_vid(gid);
    if (!vid) throw PackageNotFoundError(gid, "latest");
    if (!has_version(gid, *vid)) {
      auto files = remote_->fetch(gid, *vid);
      if (!files) throw PackageNotFoundError(gid, *vid);
      std::lock_guard lock(write_mu_);
      write_version(gid, *vid, *files, now);
    }
    meta.latest_vid = *vid;
    meta.latest_downloaded_at = now;
    {
      std::lock_guard lock(write_mu_);
      save_meta(gid, meta);
    }
    return load_version(gid, *vid);
  }

  std::optional<PackageFiles> remote_fetch(const std::string& gid,
                                           const std::string& vid) {
    if (!remote_)
      throw RemoteUnavailableError("no remote source configured to fetch " +
                                   gid + "/" + vid);
    return remote_->fetch(gid, vid);
  }

  void write_version(const std::string& gid, const std::string& vid,
                     const PackageFiles& files, std::int64_t fetched_at) {
    if (read_only_) throw StoreWriteError("store is read-only");
    for (const auto& [name, bytes] : files)
      detail::write_file_atomic(root_ / gid / vid / "files" / name, bytes);
    nlohmann::json m = {
        {"gid", gid}, {"vid", vid}, {"fetched_at", fetched_at}};
    detail::write_file_atomic(root_ / gid / vid / "manifest.json", m.dump(2));
  }

  PackageManifest load_version(const std::string& gid,
                               const std::string& vid) const {
    PackageManifest m;
    m.gid = gid;
    m.vid = vid;
    auto dir = root_ / gid / vid / "files";
    if (!std::filesystem::is_directory(dir))
      throw PackageNotFoundError(gid, vid);
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file())
        m.files[entry.path().filename().string()] =
            detail::read_file(entry.path());
    auto mpath = root_ / gid / vid / "manifest.json";
    if (std::filesystem::exists(mpath)) {
      auto j = nlohmann::json::parse(detail::read_file(mpath), nullptr, false);
      if (!j.is_discarded())
        m.fetched_at = j.value("fetched_at", std::int64_t(0));
    }
    return m;
  }

  CacheMeta load_meta(const std::string& gid) const {
    CacheMeta meta;
    meta.ttl_seconds = default_ttl_;
    auto path = root_ / gid / "meta.json";
    if (!std::filesystem::exists(path)) return meta;
    auto j = nlohmann::json::parse(detail::read_file(path), nullptr, false);
    if (j.is_discarded()) return meta;
    meta.latest_vid = j.value("latest_vid", std::string());
    meta.latest_downloaded_at = j.value("latest_downloaded_at", std::int64_t(0));
    meta.ttl_seconds = j.value("ttl_seconds", default_ttl_);
    meta.publish_counter = j.value("publish_counter", std::int64_t(0));
    return meta;
  }

  void save_meta(const std::string& gid, const CacheMeta& meta) {
    nlohmann::json j = {{"latest_vid", meta.latest_vid},
                        {"latest_downloaded_at", meta.latest_downloaded_at},
                        {"ttl_seconds", meta.ttl_seconds},
                        {"publish_counter", meta.publish_counter}};
    detail::write_file_atomic(root_ / gid / "meta.json", j.dump(2));
  }

  // Counter survives meta.json loss: rescan existing version suffixes.
  std::int64_t next_counter(const std::string& gid,
                            const CacheMeta& meta) const {
    std::int64_t counter = meta.publish_counter;
    auto dir = root_ / gid;
    if (std::filesystem::is_directory(dir)) {
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        auto name = entry.path().filename().string();
        auto dash = name.rfind('-');
        if (dash == std::string::npos) continue;
        try {
          counter = std::max(
              counter, static_cast<std::int64_t>(std::stoll(name.substr(dash + 1))));
        } catch (...) {
        }
      }
    }
    return counter + 1;
  }

  std::filesystem::path root_;
  std::shared_ptr<RemoteSource> remote_;
  std::int64_t default_ttl_;
  bool read_only_ = false;
  std::mutex write_mu_;
};

}  // namespace zoo
