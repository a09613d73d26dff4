#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zoo/backend.hpp"
#include "zoo/base64.hpp"
#include "zoo/errors.hpp"
#include "zoo/service.hpp"
#include "zoo/store.hpp"

namespace zoo {

inline const char* kBundleFormat = "zoosvc/1";

struct Artifact {
  BackendKind kind = BackendKind::Container;
  std::string uri;
  std::filesystem::path output_path;
  nlohmann::json manifest;
};

// Fully deserialized bundle: the service plus every package it references.
struct BundleManifest {
  Service service;
  std::vector<PackageManifest> packages;
};

namespace detail {

inline std::string sanitize_path_component(const std::string& s) {
  std::string out;
  for (char c : s)
    out.push_back((c == '/' || c == ':' || c == '\\') ? '_' : c);
  return out;
}

inline nlohmann::json bundle_manifest_json(
    const Service& s, const std::vector<PackageManifest>& packages) {
  nlohmann::json pkgs = nlohmann::json::array();
  for (const auto& m : packages) {
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [name, bytes] : m.files) files[name] = base64_encode(bytes);
    pkgs.push_back({{"gid", m.gid}, {"vid", m.vid}, {"files", files}});
  }
  return {{"format", kBundleFormat},
          {"service", s.to_json()},
          {"packages", pkgs}};
}

inline BundleManifest bundle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != std::string(kBundleFormat))
    throw Error("not a zoosvc bundle");
  BundleManifest b;
  b.service = Service::from_json(j.at("service"));
  for (const auto& p : j.at("packages")) {
    PackageManifest m;
    m.gid = p.at("gid").get<std::string>();
    m.vid = p.at("vid").get<std::string>();
    for (const auto& [name, b64] : p.at("files").items())
      m.files[name] = base64_decode(b64.get<std::string>());
    b.packages.push_back(std::move(m));
  }
  return b;
}

inline std::string dockerfile_for(const Service& s) {
  std::string d;
  d += "FROM zooc-runtime:latest\n";
  d += "COPY . /app\n";
  d += "EXPOSE 8080\n";
  d += "ENTRYPOINT [\"zooc\", \"serve\", \"/app\", \"--port\", \"8080\"]\n";
  d += "# service: " + s.name + " (" + s.type_string() + ")\n";
  return d;
}

}  // namespace detail

// Resolves every referenced package, rejecting unpinned ("latest") refs so
// the artifact is reproducible.
inline std::vector<PackageManifest> collect_pinned_packages(
    const Service& s, PackageStore& store, std::int64_t now) {
  std::vector<PackageManifest> out;
  for (const auto& ref : s.packages) {
    if (ref.is_latest()) throw UnpinnedDependencyError(ref.str());
    out.push_back(store.resolve(ref, now));
  }
  return out;
}

// Turns a service into a deployable artifact under out_root. With dry_run
// set, runs every check and computes the URI without writing anything.
inline Artifact publish_service(const Service& s, const BackendSpec& spec,
                                PackageStore& store,
                                const std::filesystem::path& out_root,
                                std::int64_t now = 0, bool dry_run = false) {
  s.validate();
  if (spec.target.empty()) throw Error("backend target must be non-empty");
  auto packages = collect_pinned_packages(s, store, now);

  Artifact artifact;
  artifact.kind = spec.kind;
  artifact.manifest = detail::bundle_manifest_json(s, packages);

  switch (spec.kind) {
    case BackendKind::Container: {
      auto dir = out_root / detail::sanitize_path_component(spec.target);
      artifact.output_path = dir;
      artifact.uri = "container://" + spec.target;
      if (dry_run) break;
      detail::write_file_atomic(dir / "service.json", s.to_json().dump(2));
      for (const auto& m : packages)
        for (const auto& [name, bytes] : m.files)
          detail::write_file_atomic(
              dir / "packages" / m.gid / m.vid / "files" / name, bytes);
      detail::write_file_atomic(dir / "Dockerfile", detail::dockerfile_for(s));
      detail::write_file_atomic(
          dir / "serve.json",
          nlohmann::json{{"service", s.name}, {"port", 8080}}.dump(2));
      break;
    }
    case BackendKind::Script: {
      std::filesystem::path rel = spec.target;
      if (rel.extension() != ".zoosvc") rel += ".zoosvc";
      auto path = rel.is_absolute() ? rel : out_root / rel;
      artifact.output_path = path;
      artifact.uri = "file://" +
                     std::filesystem::absolute(path).lexically_normal()
                         .generic_string();
      if (dry_run) break;
      detail::write_file_atomic(path, artifact.manifest.dump());
      break;
    }
    case BackendKind::Unikernel: {
      std::filesystem::path rel = spec.target;
      rel += ".mirage-config";
      auto path = rel.is_absolute() ? rel : out_root / rel;
      artifact.output_path = path;
      artifact.uri = "file://" +
                     std::filesystem::absolute(path).lexically_normal()
                         .generic_string();
      if (dry_run) break;
      nlohmann::json modules = nlohmann::json::array();
      for (const auto& m : packages)
        modules.push_back({{"gid", m.gid}, {"vid", m.vid}});
      nlohmann::json descriptor = {
          {"entry", s.name},
          {"signature", s.type_string()},
          {"modules", modules},
          // placeholders filled in by an actual unikernel build step
          {"network", {{"ipv4", "dhcp"}, {"port", 8080}}},
          {"kernel", "hvt"}};
      detail::write_file_atomic(path, descriptor.dump(2));
      break;
    }
  }
  return artifact;
}

inline BundleManifest load_bundle(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(detail::read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error("bundle is not valid JSON");
  return detail::bundle_from_json(j);
}

// Loads a container bundle directory written by the container backend.
inline BundleManifest load_container_bundle(const std::filesystem::path& dir) {
  auto j = nlohmann::json::parse(detail::read_file(dir / "service.json"),
                                 nullptr, false);
  if (j.is_discarded()) throw Error("service.json is not valid JSON");
  BundleManifest b;
  b.service = Service::from_json(j);
  auto pkg_root = dir / "packages";
  if (std::filesystem::is_directory(pkg_root)) {
    for (const auto& gid_dir : std::filesystem::directory_iterator(pkg_root))
      for (const auto& vid_dir :
           std::filesystem::directory_iterator(gid_dir.path())) {
        PackageManifest m;
        m.gid = gid_dir.path().filename().string();
        m.vid = vid_dir.path().filename().string();
        auto files = vid_dir.path() / "files";
        if (std::filesystem::is_directory(files))
          for (const auto& f : std::filesystem::directory_iterator(files))
            m.files[f.path().filename().string()] = detail::read_file(f.path());
        b.packages.push_back(std::move(m));
      }
  }
  return b;
}

inline std::uint64_t artifact_size_bytes(const Artifact& artifact) {
  namespace fs = std::filesystem;
  if (fs::is_directory(artifact.output_path)) {
    std::uint64_t total = 0;
    for (const auto& entry :
         fs::recursive_directory_iterator(artifact.output_path))
      if (entry.is_regular_file()) total += entry.file_size();
    return total;
  }
  if (fs::is_regular_file(artifact.output_path))
    return fs::file_size(artifact.output_path);
  return 0;
}

struct SizeReportRow {
  std::string backend;
  std::uint64_t bytes = 0;
};

inline std::vector<SizeReportRow> artifact_size_report(
    const std::vector<Artifact>& artifacts) {
  std::vector<SizeReportRow> rows;
  for (const auto& a : artifacts)
    rows.push_back({backend_name(a.kind), artifact_size_bytes(a)});
  return rows;
}

inline std::string size_report_csv(const std::vector<SizeReportRow>& rows) {
  std::string out = "backend,bytes\n";
  for (const auto& r : rows)
    out += r.backend + "," + std::to_string(r.bytes) + "\n";
  return out;
}

// Publisher used by the DSL evaluator: writes artifacts under out_root and
// remembers what it published.
class StorePublisher : public Publisher {
 public:
  StorePublisher(PackageStore& store, std::filesystem::path out_root,
                 std::int64_t now = 0, bool dry_run = false)
      : store_(store), out_root_(std::move(out_root)), now_(now),
        dry_run_(dry_run) {}

  std::string publish(const Service& service, const BackendSpec& spec) override {
    Artifact a = publish_service(service, spec, store_, out_root_, now_, dry_run_);
    published_.push_back(a);
    return a.uri;
  }

  const std::vector<Artifact>& published() const { return published_; }

 private:
  PackageStore& store_;
  std::filesystem::path out_root_;
  std::int64_t now_;
  bool dry_run_;
  std::vector<Artifact> published_;
};

}  // namespace zoo
