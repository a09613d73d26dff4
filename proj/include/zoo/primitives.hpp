#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "zoo/runtime.hpp"
#include "zoo/types.hpp"

namespace zoo {

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Deterministic table-driven stand-ins for the demo pipeline's ML stages.
// They transform opaque byte blobs, so every end-to-end run on the same
// input yields the same label.
namespace stubs {

inline const std::array<const char*, 8>& english_labels() {
  static const std::array<const char*, 8> labels = {
      "cat", "dog", "horse", "bird", "ship", "truck", "deer", "frog"};
  return labels;
}

inline const std::map<std::string, std::string>& french_dictionary() {
  static const std::map<std::string, std::string> dict = {
      {"cat", "chat"},     {"dog", "chien"},   {"horse", "cheval"},
      {"bird", "oiseau"},  {"ship", "navire"}, {"truck", "camion"},
      {"deer", "cerf"},    {"frog", "grenouille"}};
  return dict;
}

inline std::string segment(const std::string& image) { return "SEG|" + image; }

inline std::string style_image() { return "STYLE:starry-night-v1"; }

inline std::string style_transfer(const std::string& content,
                                  const std::string& style) {
  return "NST|" + content + "|" + style;
}

inline std::string classify(const std::string& image) {
  const auto& labels = english_labels();
  return labels[fnv1a64(image) % labels.size()];
}

inline std::string translate(const std::string& english) {
  const auto& dict = french_dictionary();
  auto it = dict.find(english);
  return it == dict.end() ? "inconnu" : it->second;
}

}  // namespace stubs

// Fixture package ids used by the demo pipeline (5-char gids as in short
// Gist ids). The style generator belongs to the pipeline author.
namespace fixture_gids {
inline const char* kInfer = "aa36e";
inline const char* kSeg = "d79e9";
inline const char* kNst = "6f28d";
inline const char* kTrans = "7f32a";
inline const char* kStyle = "a11ce";
}  // namespace fixture_gids

// Registry with the built-in primitives behind the demo packages.
inline PrimitiveRegistry default_registry() {
  PrimitiveRegistry reg;
  DataType png = DataType::media(MediaBase::Image, "png");
  DataType en = DataType::media(MediaBase::Text, "en");
  DataType fr = DataType::media(MediaBase::Text, "fr");

  reg.add(fixture_gids::kSeg, "seg", {{png}, png},
          [png](const std::vector<TypedValue>& a) {
            return TypedValue::of_media(png, stubs::segment(a[0].as_bytes()));
          });
  reg.add(fixture_gids::kStyle, "image_gen", {{}, png},
          [png](const std::vector<TypedValue>&) {
            return TypedValue::of_media(png, stubs::style_image());
          });
  reg.add(fixture_gids::kNst, "run", {{png, png}, png},
          [png](const std::vector<TypedValue>& a) {
            return TypedValue::of_media(
                png, stubs::style_transfer(a[0].as_bytes(), a[1].as_bytes()));
          });
  reg.add(fixture_gids::kInfer, "infer", {{png}, en},
          [en](const std::vector<TypedValue>& a) {
            return TypedValue::of_media(en, stubs::classify(a[0].as_bytes()));
          });
  reg.add(fixture_gids::kTrans, "trans", {{en}, fr},
          [fr](const std::vector<TypedValue>& a) {
            return TypedValue::of_media(fr, stubs::translate(a[0].as_bytes()));
          });
  return reg;
}

}  // namespace zoo
