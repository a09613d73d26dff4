#pragma once

// Shared fixtures for the unit and acceptance suites: temp directories,
// random generators over the type lattice, a scriptable fake remote, the
// demo fixture packages and synthetic executable services.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zoo/zoo.hpp"

#ifndef ZOO_DEMO_DIR
#define ZOO_DEMO_DIR "demo"
#endif

namespace zt {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    auto base = fs::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / ("zoo-" + tag + "-" + std::to_string(std::rand()) +
                               "-" + std::to_string(i));
      std::error_code ec;
      if (fs::create_directories(candidate, ec)) {
        path = candidate;
        return;
      }
    }
    throw zoo::Error("cannot create temp dir");
  }

  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path operator/(const std::string& sub) const { return path / sub; }
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- random generators over the type lattice ----

inline const std::vector<zoo::DataType>& all_types() {
  using zoo::DataType;
  using zoo::MediaBase;
  using zoo::PrimitiveKind;
  static const std::vector<DataType> types = {
      DataType::primitive(PrimitiveKind::Int),
      DataType::primitive(PrimitiveKind::Float),
      DataType::primitive(PrimitiveKind::Bool),
      DataType::primitive(PrimitiveKind::String),
      DataType::ndarray(),
      DataType::media(MediaBase::Image, "png"),
      DataType::media(MediaBase::Image, "jpeg"),
      DataType::media(MediaBase::Text, "en"),
      DataType::media(MediaBase::Text, "fr"),
      DataType::media(MediaBase::Voice, "en"),
      DataType::media(MediaBase::Voice, "fr"),
  };
  return types;
}

inline zoo::DataType random_type(std::mt19937_64& rng) {
  const auto& ts = all_types();
  return ts[rng() % ts.size()];
}

// A random type different from `avoid`.
inline zoo::DataType random_other_type(std::mt19937_64& rng,
                                       const zoo::DataType& avoid) {
  while (true) {
    auto t = random_type(rng);
    if (!(t == avoid)) return t;
  }
}

inline zoo::ServiceSignature random_signature(std::mt19937_64& rng,
                                              std::size_t max_arity = 4) {
  zoo::ServiceSignature sig;
  std::size_t n = rng() % (max_arity + 1);
  for (std::size_t i = 0; i < n; ++i) sig.inputs.push_back(random_type(rng));
  sig.output = random_type(rng);
  return sig;
}

// Single-node service over an explicit (already "published") package ref.
inline zoo::Service leaf_service(const std::string& name,
                                 const std::string& gid,
                                 const std::string& vid,
                                 zoo::ServiceSignature sig) {
  zoo::Service s;
  s.name = name;
  s.signature = std::move(sig);
  s.graph.add_node(name, gid, static_cast<int>(s.signature.arity()));
  zoo::VersionRef ref;
  ref.gid = gid;
  ref.vid = vid;
  s.packages.push_back(ref);
  s.validate();
  return s;
}

// A well-typed composition instance: arity(g) producers whose outputs line
// up with g's inputs.
struct ComposeInstance {
  std::vector<zoo::Service> fs;
  zoo::Service g;

  std::size_t expected_arity() const {
    std::size_t sum = 0;
    for (const auto& f : fs) sum += f.signature.arity();
    return sum;
  }
};

inline ComposeInstance random_well_typed(std::mt19937_64& rng,
                                         std::size_t min_consumer_arity = 1) {
  ComposeInstance inst;
  std::size_t n = min_consumer_arity + rng() % (4 - min_consumer_arity + 1);
  zoo::ServiceSignature gsig;
  for (std::size_t i = 0; i < n; ++i) gsig.inputs.push_back(random_type(rng));
  gsig.output = random_type(rng);
  inst.g = leaf_service("g", "g" + std::to_string(rng() % 100000), "v-1",
                        gsig);
  for (std::size_t i = 0; i < n; ++i) {
    zoo::ServiceSignature fsig = random_signature(rng, 3);
    fsig.output = gsig.inputs[i];
    inst.fs.push_back(leaf_service("f" + std::to_string(i),
                                   "f" + std::to_string(rng() % 100000), "v-1",
                                   fsig));
  }
  return inst;
}

// ---- scriptable fake remote with call counters ----

class ScriptedRemote : public zoo::RemoteSource {
 public:
  int latest_calls = 0;
  int fetch_calls = 0;
  bool reachable = true;

  void push(const std::string& gid, const std::string& vid,
            zoo::PackageFiles files) {
    versions_[{gid, vid}] = std::move(files);
    latest_[gid] = vid;
  }

  std::optional<std::string> latest_vid(const std::string& gid) override {
    ++latest_calls;
    if (!reachable) throw zoo::RemoteUnavailableError("scripted outage");
    auto it = latest_.find(gid);
    if (it == latest_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<zoo::PackageFiles> fetch(const std::string& gid,
                                         const std::string& vid) override {
    ++fetch_calls;
    if (!reachable) throw zoo::RemoteUnavailableError("scripted outage");
    auto it = versions_.find({gid, vid});
    if (it == versions_.end()) return std::nullopt;
    return it->second;
  }

  int total_calls() const { return latest_calls + fetch_calls; }

 private:
  std::map<std::pair<std::string, std::string>, zoo::PackageFiles> versions_;
  std::map<std::string, std::string> latest_;
};

// ---- demo fixture packages ----

inline const std::map<std::string, std::string>& fixture_gid_by_dir() {
  static const std::map<std::string, std::string> m = {
      {"infer", zoo::fixture_gids::kInfer},
      {"seg", zoo::fixture_gids::kSeg},
      {"nst", zoo::fixture_gids::kNst},
      {"trans", zoo::fixture_gids::kTrans},
      {"style", zoo::fixture_gids::kStyle},
  };
  return m;
}

inline zoo::PackageFiles read_demo_package(const std::string& name) {
  zoo::PackageFiles files;
  fs::path dir = fs::path(ZOO_DEMO_DIR) / "packages" / name;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file())
      files[entry.path().filename().string()] = slurp(entry.path());
  return files;
}

// Publishes the five demo packages under their fixed gids; returns
// directory-name -> explicit ref.
inline std::map<std::string, zoo::VersionRef> publish_fixture_packages(
    zoo::PackageStore& store, std::int64_t now = 0) {
  std::map<std::string, zoo::VersionRef> refs;
  for (const auto& [dir_name, gid] : fixture_gid_by_dir())
    refs[dir_name] =
        store.publish_package(read_demo_package(dir_name), gid, true, now);
  return refs;
}

inline std::string demo_input_png() {
  return slurp(fs::path(ZOO_DEMO_DIR) / "input.png");
}

// The label the demo pipeline must produce for demo/input.png; computed
// once with an independent implementation of the stub chain and frozen.
inline const char* kExpectedFrenchLabel = "navire";

// Builds the demo pipeline ([seg; style] $> nst $> infer $> trans) through
// the library path (no DSL involved).
inline zoo::Service build_usecase_pipeline(zoo::PackageStore& store,
                                           std::int64_t now = 0) {
  auto refs = publish_fixture_packages(store, now);
  auto svc = [&](const std::string& dir, const std::string& fn) {
    return zoo::create_service(refs.at(dir), store, now).at(fn);
  };
  zoo::Service stage1 =
      zoo::compose({svc("seg", "seg"), svc("style", "image_gen")},
                   svc("nst", "run"));
  zoo::Service stage2 = zoo::compose({stage1}, svc("infer", "infer"));
  return zoo::compose({stage2}, svc("trans", "trans"));
}

// ---- synthetic executable services ----

// Deterministic value of the given type derived from a hash; every field
// round-trips exactly through the JSON wire encoding.
inline zoo::TypedValue synth_value(const zoo::DataType& t, std::uint64_t h) {
  using zoo::DataType;
  switch (t.kind) {
    case DataType::Kind::Int:
      return zoo::TypedValue::of_int(static_cast<std::int64_t>(h));
    case DataType::Kind::Float:
      return zoo::TypedValue::of_float(
          static_cast<double>(h % 1000003) / 997.0);
    case DataType::Kind::Bool:
      return zoo::TypedValue::of_bool((h & 1) != 0);
    case DataType::Kind::String:
      return zoo::TypedValue::of_string("s" + std::to_string(h));
    case DataType::Kind::Media:
      return zoo::TypedValue::of_media(
          t, zoo::type_token(t) + ":" + std::to_string(h));
    case DataType::Kind::Ndarray: {
      std::size_t n = 1 + h % 4;
      std::vector<double> values;
      for (std::size_t i = 0; i < n; ++i)
        values.push_back(static_cast<double>((h >> (8 * i)) & 0xffff) / 256.0);
      return zoo::TypedValue::of_ndarray(zoo::Ndarray({n}, std::move(values)));
    }
  }
  return zoo::TypedValue::of_int(0);
}

// Registers a deterministic primitive for a leaf service: the output hashes
// the function identity together with the wire encoding of the arguments.
inline void register_synthetic(zoo::PrimitiveRegistry& reg,
                               const std::string& gid, const std::string& name,
                               const zoo::ServiceSignature& sig) {
  reg.add(gid, name, sig,
          [gid, name, sig](const std::vector<zoo::TypedValue>& args) {
            std::string material = gid + "#" + name;
            for (const auto& a : args)
              material += "|" + zoo::encode_typed_value(a).dump();
            return synth_value(sig.output, zoo::fnv1a64(material));
          });
}

// A random executable pipeline whose leaf packages are published into the
// store (so it can be bundled) and whose primitives land in `reg`.
inline zoo::Service random_executable_pipeline(std::mt19937_64& rng,
                                               zoo::PackageStore& store,
                                               zoo::PrimitiveRegistry& reg,
                                               std::int64_t now = 0) {
  auto make_leaf = [&](const zoo::ServiceSignature& sig) {
    static int counter = 0;
    std::string fn = "fn" + std::to_string(counter++);
    zoo::PackageFiles files;
    files[zoo::kConfigFileName] =
        nlohmann::json{{fn, zoo::format_type_string(sig)}}.dump();
    auto ref = store.publish_package(files, std::nullopt, true, now);
    register_synthetic(reg, ref.gid, fn, sig);
    return zoo::create_service(ref, store, now).at(fn);
  };

  std::size_t n = 1 + rng() % 3;
  zoo::ServiceSignature gsig;
  for (std::size_t i = 0; i < n; ++i) gsig.inputs.push_back(random_type(rng));
  gsig.output = random_type(rng);
  zoo::Service g = make_leaf(gsig);

  std::vector<zoo::Service> producers;
  for (std::size_t i = 0; i < n; ++i) {
    zoo::ServiceSignature fsig;
    std::size_t m = rng() % 3;
    for (std::size_t k = 0; k < m; ++k) fsig.inputs.push_back(random_type(rng));
    fsig.output = gsig.inputs[i];
    producers.push_back(make_leaf(fsig));
  }
  zoo::Service pipeline = zoo::compose(producers, g);

  // Sometimes chain one more consumer stage.
  if (rng() % 2 == 0) {
    zoo::ServiceSignature next;
    next.inputs.push_back(pipeline.signature.output);
    next.output = random_type(rng);
    pipeline = zoo::compose({pipeline}, make_leaf(next));
  }
  return pipeline;
}

inline std::vector<zoo::TypedValue> random_inputs_for(
    const zoo::Service& s, std::mt19937_64& rng) {
  std::vector<zoo::TypedValue> inputs;
  for (const auto& t : s.signature.inputs) inputs.push_back(synth_value(t, rng()));
  return inputs;
}

// ---- CLI runner ----

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::string& args,
                         const std::string& env_prefix = "") {
  TempDir io("cli-io");
  auto out_file = io / "out.txt";
  auto err_file = io / "err.txt";
#ifdef ZOOC_BIN
  std::string bin = ZOOC_BIN;
#else
  std::string bin = "zooc";
#endif
  std::string cmd = env_prefix + " " + bin + " " + args + " > " +
                    out_file.string() + " 2> " + err_file.string();
  int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

}  // namespace zt
