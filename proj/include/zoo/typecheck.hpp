#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "zoo/errors.hpp"
#include "zoo/service.hpp"
#include "zoo/store.hpp"
#include "zoo/types.hpp"

namespace zoo {

using ServiceDict = std::map<std::string, Service>;

inline const char* kServiceFileName = "service.json";

// Builds one Service per function exposed in the package's zoo.json.
// A package produced by save_composed carries a service.json; in that case
// the composed service is reconstructed instead of a single-node one.
inline ServiceDict create_service(const VersionRef& ref, PackageStore& store,
                                  std::int64_t now = 0) {
  PackageManifest manifest = store.resolve(ref, now);

  if (auto it = manifest.files.find(kServiceFileName);
      it != manifest.files.end()) {
    auto j = nlohmann::json::parse(it->second, nullptr, false);
    if (j.is_discarded()) throw ConfigParseError("service.json is not JSON");
    Service s = Service::from_json(j);
    auto config = manifest.config();
    if (!config.contains(s.name))
      throw ConfigParseError("config does not expose \"" + s.name + "\"");
    return {{s.name, std::move(s)}};
  }

  if (!manifest.has_config())
    throw ConfigMissingError(manifest.gid, manifest.vid);
  nlohmann::json config = manifest.config();
  if (!config.is_object())
    throw ConfigParseError("top level must be an object");
  if (config.empty())
    throw ConfigParseError("config must expose at least one function");

  ServiceDict dict;
  for (const auto& [fn_name, type_str] : config.items()) {
    if (!type_str.is_string())
      throw ConfigParseError("signature of \"" + fn_name +
                             "\" must be a string");
    Service s;
    s.name = fn_name;
    s.signature = parse_type_string(type_str.get<std::string>());
    s.graph.add_node(fn_name, manifest.gid,
                     static_cast<int>(s.signature.arity()));
    s.packages.push_back(ref);
    s.validate();
    dict.emplace(fn_name, std::move(s));
  }
  return dict;
}

// [f_1, ..., f_n] $> g. Checks arity(g) == n and t_f_i == t_g^i for all i,
// then wires each f_i's sink into g's i-th unfed input slot. The result has
// sum(m_s) inputs (the f_i's inputs concatenated in order) and g's output.
inline Service compose(const std::vector<Service>& fs, const Service& g) {
  if (fs.size() != g.signature.arity())
    throw ArityMismatchError(g.signature.arity(), fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (fs[i].signature.output != g.signature.inputs[i])
      throw TypeMismatchError(i, type_token(g.signature.inputs[i]),
                              type_token(fs[i].signature.output));

  Service out;
  out.name = g.name;
  out.signature.output = g.signature.output;

  std::vector<NodeId> producer_sinks;
  for (const auto& f : fs) {
    auto remap = out.graph.absorb(f.graph);
    producer_sinks.push_back(remap.at(f.graph.sink()));
    out.signature.inputs.insert(out.signature.inputs.end(),
                                f.signature.inputs.begin(),
                                f.signature.inputs.end());
  }

  auto g_open = g.graph.open_inputs();
  auto g_remap = out.graph.absorb(g.graph);
  for (std::size_t i = 0; i < fs.size(); ++i)
    out.graph.add_edge(producer_sinks[i], g_remap.at(g_open[i].node),
                       g_open[i].position);

  std::set<std::string> seen;
  for (const auto& svc : fs)
    for (const auto& p : svc.packages)
      if (seen.insert(p.dedup_key()).second) out.packages.push_back(p);
  for (const auto& p : g.packages)
    if (seen.insert(p.dedup_key()).second) out.packages.push_back(p);

  out.validate();
  return out;
}

// Persists a composed service as a new package: zoo.json exposing it under
// its name, service.json with the full structure, and the dependency graph
// pinned beside the version.
inline VersionRef save_composed(const Service& s, PackageStore& store,
                                std::int64_t now = 0) {
  s.validate();
  if (s.name.empty()) throw Error("composed service needs a name before saving");

  PackageFiles files;
  files[kConfigFileName] =
      nlohmann::json{{s.name, s.type_string()}}.dump(2);
  files[kServiceFileName] = s.to_json().dump(2);

  VersionRef ref = store.publish_package(files, std::nullopt, true, now);
  store.save_dependency_graph(ref, s.graph);
  return ref;
}

}  // namespace zoo
