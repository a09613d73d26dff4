#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "zoo/errors.hpp"

namespace zoo {

enum class PrimitiveKind { Int, Float, Bool, String };
enum class MediaBase { Image, Text, Voice };

inline std::string media_base_token(MediaBase base) {
  switch (base) {
    case MediaBase::Image: return "img";
    case MediaBase::Text: return "text";
    case MediaBase::Voice: return "voice";
  }
  return "img";
}

// A media type (image/text/voice tagged with a subtype), a primitive, or an
// ndarray. Equality is structural; there is no subtyping between media types.
struct DataType {
  enum class Kind { Int, Float, Bool, String, Ndarray, Media };

  Kind kind = Kind::Int;
  MediaBase base = MediaBase::Image;  // meaningful only when kind == Media
  std::string subtype;                // meaningful only when kind == Media

  static DataType primitive(PrimitiveKind k) {
    DataType t;
    switch (k) {
      case PrimitiveKind::Int: t.kind = Kind::Int; break;
      case PrimitiveKind::Float: t.kind = Kind::Float; break;
      case PrimitiveKind::Bool: t.kind = Kind::Bool; break;
      case PrimitiveKind::String: t.kind = Kind::String; break;
    }
    return t;
  }
  static DataType ndarray() {
    DataType t;
    t.kind = Kind::Ndarray;
    return t;
  }
  static DataType media(MediaBase base, std::string subtype) {
    DataType t;
    t.kind = Kind::Media;
    t.base = base;
    t.subtype = std::move(subtype);
    return t;
  }

  bool is_media() const { return kind == Kind::Media; }

  friend bool operator==(const DataType& a, const DataType& b) {
    if (a.kind != b.kind) return false;
    if (a.kind != Kind::Media) return true;
    return a.base == b.base && a.subtype == b.subtype;
  }
  friend bool operator!=(const DataType& a, const DataType& b) {
    return !(a == b);
  }
};

// Maps type tokens (the spelling used in arrow signatures, e.g. "png_img")
// to DataTypes. Media subtypes are extensible at runtime; the built-in set
// can only grow, so no media base is ever left without subtypes.
class TypeRegistry {
 public:
  TypeRegistry() {
    by_token_["int"] = DataType::primitive(PrimitiveKind::Int);
    by_token_["float"] = DataType::primitive(PrimitiveKind::Float);
    by_token_["bool"] = DataType::primitive(PrimitiveKind::Bool);
    by_token_["string"] = DataType::primitive(PrimitiveKind::String);
    by_token_["ndarray"] = DataType::ndarray();
    register_media_subtype(MediaBase::Image, "png");
    register_media_subtype(MediaBase::Image, "jpeg");
    register_media_subtype(MediaBase::Text, "en");
    register_media_subtype(MediaBase::Text, "fr");
    register_media_subtype(MediaBase::Voice, "en");
    register_media_subtype(MediaBase::Voice, "fr");
  }

  static TypeRegistry& global() {
    static TypeRegistry instance;
    return instance;
  }

  void register_media_subtype(MediaBase base, const std::string& subtype) {
    std::unique_lock lock(mu_);
    by_token_[subtype + "_" + media_base_token(base)] =
        DataType::media(base, subtype);
  }

  std::optional<DataType> parse_token(const std::string& token) const {
    std::shared_lock lock(mu_);
    auto it = by_token_.find(token);
    if (it == by_token_.end()) return std::nullopt;
    return it->second;
  }

  std::string token_for(const DataType& t) const {
    switch (t.kind) {
      case DataType::Kind::Int: return "int";
      case DataType::Kind::Float: return "float";
      case DataType::Kind::Bool: return "bool";
      case DataType::Kind::String: return "string";
      case DataType::Kind::Ndarray: return "ndarray";
      case DataType::Kind::Media:
        return t.subtype + "_" + media_base_token(t.base);
    }
    return "int";
  }

  std::vector<std::string> tokens() const {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    out.reserve(by_token_.size());
    for (const auto& [tok, _] : by_token_) out.push_back(tok);
    return out;
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, DataType> by_token_;
};

inline std::string type_token(const DataType& t,
                              const TypeRegistry& reg = TypeRegistry::global()) {
  return reg.token_for(t);
}

// Arrow signature of a service: zero or more inputs, exactly one output.
struct ServiceSignature {
  std::vector<DataType> inputs;
  DataType output;

  std::size_t arity() const { return inputs.size(); }

  friend bool operator==(const ServiceSignature& a, const ServiceSignature& b) {
    return a.inputs == b.inputs && a.output == b.output;
  }
  friend bool operator!=(const ServiceSignature& a, const ServiceSignature& b) {
    return !(a == b);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace detail

// Parses an arrow-separated type string such as "png_img -> en_text".
// The last token is the output type; everything before it is an input.
inline ServiceSignature parse_type_string(
    const std::string& s, const TypeRegistry& reg = TypeRegistry::global()) {
  if (detail::trim(s).empty()) throw EmptySignatureError();

  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (true) {
    auto arrow = s.find("->", pos);
    if (arrow == std::string::npos) {
      tokens.push_back(detail::trim(s.substr(pos)));
      break;
    }
    tokens.push_back(detail::trim(s.substr(pos, arrow - pos)));
    pos = arrow + 2;
  }

  ServiceSignature sig;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto t = reg.parse_token(tokens[i]);
    if (!t) throw UnknownTypeError(tokens[i]);
    if (i + 1 == tokens.size())
      sig.output = *t;
    else
      sig.inputs.push_back(*t);
  }
  return sig;
}

// Inverse of parse_type_string: parse(format(sig)) == sig.
inline std::string format_type_string(
    const ServiceSignature& sig,
    const TypeRegistry& reg = TypeRegistry::global()) {
  std::string out;
  for (const auto& in : sig.inputs) {
    out += reg.token_for(in);
    out += " -> ";
  }
  out += reg.token_for(sig.output);
  return out;
}

}  // namespace zoo
