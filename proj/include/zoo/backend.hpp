#pragma once

#include <string>

#include "zoo/errors.hpp"
#include "zoo/service.hpp"

namespace zoo {

enum class BackendKind { Container, Script, Unikernel };

inline std::string backend_name(BackendKind k) {
  switch (k) {
    case BackendKind::Container: return "container";
    case BackendKind::Script: return "script";
    case BackendKind::Unikernel: return "unikernel";
  }
  return "container";
}

inline BackendKind backend_from_name(const std::string& name) {
  if (name == "container") return BackendKind::Container;
  if (name == "script") return BackendKind::Script;
  if (name == "unikernel") return BackendKind::Unikernel;
  throw UnknownBackendError(name);
}

// Deployment target: a container image tag or an output path.
struct BackendSpec {
  BackendKind kind = BackendKind::Container;
  std::string target;

  friend bool operator==(const BackendSpec& a, const BackendSpec& b) {
    return a.kind == b.kind && a.target == b.target;
  }
};

// What the DSL's $@ operator calls into. Returns the URI of the deployed
// resource. A dry-run implementation validates without writing artifacts.
class Publisher {
 public:
  virtual ~Publisher() = default;
  virtual std::string publish(const Service& service,
                              const BackendSpec& spec) = 0;
};

}  // namespace zoo
