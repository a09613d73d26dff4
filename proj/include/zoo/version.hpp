#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zoo/errors.hpp"

namespace zoo {

// Reference to a package version, following the gid/[vid|latest]/pin naming
// scheme. A bare gid means "latest". Package ids are lowercase alphanumeric.
struct VersionRef {
  std::string gid;
  std::optional<std::string> vid;  // nullopt = latest
  bool pin = false;

  bool is_latest() const { return !vid.has_value(); }

  static bool valid_gid(const std::string& g) {
    if (g.empty()) return false;
    for (char c : g)
      if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
    return true;
  }

  static VersionRef parse(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      auto slash = text.find('/', pos);
      if (slash == std::string::npos) {
        parts.push_back(text.substr(pos));
        break;
      }
      parts.push_back(text.substr(pos, slash - pos));
      pos = slash + 1;
    }
    if (parts.empty() || parts.size() > 3) throw InvalidRefError(text);

    VersionRef ref;
    ref.gid = parts[0];
    if (!valid_gid(ref.gid)) throw InvalidRefError(text);
    parts.erase(parts.begin());

    if (!parts.empty() && parts.back() == "pin") {
      ref.pin = true;
      parts.pop_back();
    }
    if (parts.size() > 1) throw InvalidRefError(text);
    if (!parts.empty()) {
      const std::string& v = parts.front();
      if (v.empty() || v == "pin") throw InvalidRefError(text);
      if (v != "latest") ref.vid = v;
    }
    return ref;
  }

  std::string str() const {
    std::string out = gid;
    out += "/";
    out += vid ? *vid : "latest";
    if (pin) out += "/pin";
    return out;
  }

  // Identity used for dependency deduplication: (gid, version) only.
  std::string dedup_key() const { return gid + "/" + (vid ? *vid : "latest"); }

  friend bool operator==(const VersionRef& a, const VersionRef& b) {
    return a.gid == b.gid && a.vid == b.vid && a.pin == b.pin;
  }
};

}  // namespace zoo
