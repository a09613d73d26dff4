#pragma once

#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "zoo/base64.hpp"
#include "zoo/errors.hpp"
#include "zoo/publish.hpp"
#include "zoo/runtime.hpp"
#include "zoo/service.hpp"

namespace zoo {

// Wire encoding of a TypedValue: {"type": token, "data": ...} with numbers
// for primitives, base64 for media blobs and {shape, values} for ndarrays.
inline nlohmann::json encode_typed_value(const TypedValue& v) {
  nlohmann::json data;
  switch (v.dtype.kind) {
    case DataType::Kind::Int: data = v.as_int(); break;
    case DataType::Kind::Float: data = v.as_float(); break;
    case DataType::Kind::Bool: data = v.as_bool(); break;
    case DataType::Kind::String: data = v.as_string(); break;
    case DataType::Kind::Media: data = base64_encode(v.as_bytes()); break;
    case DataType::Kind::Ndarray: {
      const Ndarray& a = v.as_ndarray();
      data = {{"shape", a.shape}, {"values", a.data}};
      break;
    }
  }
  return {{"type", type_token(v.dtype)}, {"data", data}};
}

inline TypedValue decode_typed_value(
    const nlohmann::json& j,
    const TypeRegistry& reg = TypeRegistry::global()) {
  if (!j.is_object() || !j.contains("type") || !j.contains("data"))
    throw WireFormatError("expected {\"type\": ..., \"data\": ...}");
  if (!j.at("type").is_string()) throw WireFormatError("\"type\" must be a string");
  auto token = j.at("type").get<std::string>();
  auto dtype = reg.parse_token(token);
  if (!dtype) throw WireFormatError("unknown type token \"" + token + "\"");
  const auto& data = j.at("data");

  switch (dtype->kind) {
    case DataType::Kind::Int:
      if (!data.is_number_integer())
        throw WireFormatError("int payload must be a JSON integer");
      return TypedValue::of_int(data.get<std::int64_t>());
    case DataType::Kind::Float:
      if (!data.is_number())
        throw WireFormatError("float payload must be a JSON number");
      return TypedValue::of_float(data.get<double>());
    case DataType::Kind::Bool:
      if (!data.is_boolean())
        throw WireFormatError("bool payload must be a JSON boolean");
      return TypedValue::of_bool(data.get<bool>());
    case DataType::Kind::String:
      if (!data.is_string())
        throw WireFormatError("string payload must be a JSON string");
      return TypedValue::of_string(data.get<std::string>());
    case DataType::Kind::Media:
      if (!data.is_string())
        throw WireFormatError("media payload must be a base64 string");
      return TypedValue::of_media(*dtype, base64_decode(data.get<std::string>()));
    case DataType::Kind::Ndarray: {
      if (!data.is_object() || !data.contains("shape") || !data.contains("values"))
        throw WireFormatError("ndarray payload must be {shape, values}");
      try {
        Ndarray a(data.at("shape").get<std::vector<std::size_t>>(),
                  data.at("values").get<std::vector<double>>());
        return TypedValue::of_ndarray(std::move(a));
      } catch (const ShapeMismatchError& e) {
        throw WireFormatError(e.what());
      } catch (const nlohmann::json::exception& e) {
        throw WireFormatError(e.what());
      }
    }
  }
  throw WireFormatError("unreachable");
}

// REST front end of one service:
//   GET  /signature -> JSON string with the arrow type
//   POST /invoke    {"inputs": [...]} -> {"output": ...}
// 400 carries the type-check failure, 422 a malformed encoding, 500 a
// primitive failure. The service and registry are read-only after start.
class ServiceServer {
 public:
  ServiceServer(Service service, const PrimitiveRegistry& registry)
      : service_(std::move(service)), registry_(registry) {
    server_.Get("/signature",
                [this](const httplib::Request&, httplib::Response& res) {
                  nlohmann::json j = service_.type_string();
                  res.set_content(j.dump(), "application/json");
                });
    server_.Post("/invoke", [this](const httplib::Request& req,
                                   httplib::Response& res) {
      handle_invoke(req, res);
    });
  }

  ~ServiceServer() { stop(); }

  int start(int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port("127.0.0.1")
                      : (server_.bind_to_port("127.0.0.1", port) ? port : -1);
    if (port_ <= 0) throw Error("cannot bind service server");
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
  const Service& service() const { return service_; }

 private:
  void handle_invoke(const httplib::Request& req, httplib::Response& res) {
    auto fail = [&](int status, const nlohmann::json& body) {
      res.status = status;
      res.set_content(body.dump(), "application/json");
    };

    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("inputs") ||
        !j.at("inputs").is_array())
      return fail(422, {{"error", "body must be {\"inputs\": [...]}"}});

    std::vector<TypedValue> inputs;
    try {
      for (const auto& item : j.at("inputs"))
        inputs.push_back(decode_typed_value(item));
    } catch (const WireFormatError& e) {
      return fail(422, {{"error", e.what()}});
    }

    try {
      TypedValue out = execute(service_, inputs, registry_);
      res.set_content(nlohmann::json{{"output", encode_typed_value(out)}}.dump(),
                      "application/json");
    } catch (const InputTypeMismatchError& e) {
      fail(400, {{"error", e.what()},
                 {"position", e.position},
                 {"expected", e.expected},
                 {"found", e.found}});
    } catch (const Error& e) {
      fail(500, {{"error", e.what()}});
    }
  }

  Service service_;
  const PrimitiveRegistry& registry_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

// Client-side helper mirroring the /invoke contract.
inline TypedValue invoke_over_http(const std::string& host, int port,
                                   const std::vector<TypedValue>& inputs) {
  httplib::Client client(host, port);
  nlohmann::json body;
  body["inputs"] = nlohmann::json::array();
  for (const auto& v : inputs) body["inputs"].push_back(encode_typed_value(v));
  auto res = client.Post("/invoke", body.dump(), "application/json");
  if (!res) throw Error("cannot reach service server");
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (res->status != 200) {
    std::string detail = j.is_discarded() ? "" : j.value("error", "");
    throw Error("invoke failed with status " + std::to_string(res->status) +
                ": " + detail);
  }
  if (j.is_discarded() || !j.contains("output"))
    throw WireFormatError("response lacks \"output\"");
  return decode_typed_value(j.at("output"));
}

}  // namespace zoo
