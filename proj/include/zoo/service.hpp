#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zoo/graph.hpp"
#include "zoo/ndarray.hpp"
#include "zoo/types.hpp"
#include "zoo/version.hpp"

namespace zoo {

// The composable unit: package references, an arrow signature, and the
// dependency graph wiring package functions together. Immutable once built.
struct Service {
  std::string name;
  ServiceSignature signature;
  DependencyGraph graph;
  std::vector<VersionRef> packages;

  std::string type_string() const { return format_type_string(signature); }

  void validate() const {
    if (graph.empty()) throw GraphError("service has an empty graph");
    graph.sink();  // exactly one
    if (graph.open_inputs().size() != signature.inputs.size())
      throw GraphError("signature lists " +
                       std::to_string(signature.inputs.size()) +
                       " inputs but graph has " +
                       std::to_string(graph.open_inputs().size()) +
                       " unfed positions");
    for (const auto& n : graph.nodes()) {
      bool covered = false;
      for (const auto& p : packages)
        if (p.gid == n.package_id) covered = true;
      if (!covered)
        throw GraphError("node package \"" + n.package_id +
                         "\" missing from package list");
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json pkgs = nlohmann::json::array();
    for (const auto& p : packages) pkgs.push_back(p.str());
    return {{"name", name},
            {"signature", type_string()},
            {"packages", pkgs},
            {"graph", graph.to_json()}};
  }

  static Service from_json(const nlohmann::json& j) {
    Service s;
    s.name = j.at("name").get<std::string>();
    s.signature = parse_type_string(j.at("signature").get<std::string>());
    for (const auto& p : j.at("packages"))
      s.packages.push_back(VersionRef::parse(p.get<std::string>()));
    s.graph = DependencyGraph::from_json(j.at("graph"));
    s.validate();
    return s;
  }
};

// Runtime carrier for typed data. Media payloads are opaque byte blobs; no
// decoding happens here, the type tag alone drives checking.
struct TypedValue {
  DataType dtype;
  std::variant<std::int64_t, double, bool, std::string, Ndarray> payload;

  static TypedValue of_int(std::int64_t v) {
    return {DataType::primitive(PrimitiveKind::Int), v};
  }
  static TypedValue of_float(double v) {
    return {DataType::primitive(PrimitiveKind::Float), v};
  }
  static TypedValue of_bool(bool v) {
    return {DataType::primitive(PrimitiveKind::Bool), v};
  }
  static TypedValue of_string(std::string v) {
    return {DataType::primitive(PrimitiveKind::String), std::move(v)};
  }
  static TypedValue of_media(DataType dtype, std::string bytes) {
    return {std::move(dtype), std::move(bytes)};
  }
  static TypedValue of_ndarray(Ndarray a) {
    return {DataType::ndarray(), std::move(a)};
  }

  std::int64_t as_int() const { return std::get<std::int64_t>(payload); }
  double as_float() const { return std::get<double>(payload); }
  bool as_bool() const { return std::get<bool>(payload); }
  const std::string& as_string() const { return std::get<std::string>(payload); }
  const std::string& as_bytes() const { return std::get<std::string>(payload); }
  const Ndarray& as_ndarray() const { return std::get<Ndarray>(payload); }

  void validate() const {
    bool ok = false;
    switch (dtype.kind) {
      case DataType::Kind::Int:
        ok = std::holds_alternative<std::int64_t>(payload);
        break;
      case DataType::Kind::Float:
        ok = std::holds_alternative<double>(payload);
        break;
      case DataType::Kind::Bool:
        ok = std::holds_alternative<bool>(payload);
        break;
      case DataType::Kind::String:
      case DataType::Kind::Media:
        ok = std::holds_alternative<std::string>(payload);
        break;
      case DataType::Kind::Ndarray:
        ok = std::holds_alternative<Ndarray>(payload);
        break;
    }
    if (!ok)
      throw Error("payload representation does not match type " +
                  type_token(dtype));
  }

  friend bool operator==(const TypedValue& a, const TypedValue& b) {
    return a.dtype == b.dtype && a.payload == b.payload;
  }
  friend bool operator!=(const TypedValue& a, const TypedValue& b) {
    return !(a == b);
  }
};

}  // namespace zoo
