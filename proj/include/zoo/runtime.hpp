#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "zoo/errors.hpp"
#include "zoo/ndarray.hpp"
#include "zoo/service.hpp"

namespace zoo {

// ---- gradient descent ----

struct GdConfig {
  double step_size = 0.01;
  std::int64_t max_iters = 1'000'000;
  double tol = 1e-8;
  double fd_step = 1e-6;
  // Fixed starting point; when unset, drawn uniformly from [0, 10] with seed.
  std::optional<double> init;
  std::uint64_t seed = 42;
  // Analytic derivative; when unset, a central finite difference is used.
  std::function<double(double)> derivative;

  void validate() const {
    if (step_size <= 0) throw Error("GdConfig: step_size must be positive");
    if (tol <= 0) throw Error("GdConfig: tol must be positive");
    if (fd_step <= 0) throw Error("GdConfig: fd_step must be positive");
    if (max_iters <= 0) throw Error("GdConfig: max_iters must be positive");
  }
};

struct GdResult {
  double argmin = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;  // false means the iteration budget ran out
};

// Fixed-step descent x_{k+1} = x_k - eta * f'(x_k); stops when the step
// shrinks below tol. Hitting max_iters is a flagged success, not an error.
template <class F>
GdResult gradient_descent(F f, const GdConfig& cfg) {
  cfg.validate();

  double x;
  if (cfg.init) {
    x = *cfg.init;
  } else {
    std::mt19937_64 rng(cfg.seed);
    x = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
  }
  if (!std::isfinite(f(x))) throw DivergedError(x);

  auto slope = [&](double at) {
    if (cfg.derivative) return cfg.derivative(at);
    return (f(at + cfg.fd_step) - f(at - cfg.fd_step)) / (2.0 * cfg.fd_step);
  };

  for (std::int64_t k = 0; k < cfg.max_iters; ++k) {
    double next = x - cfg.step_size * slope(x);
    if (!std::isfinite(next) || std::fabs(next) > 1e12 ||
        !std::isfinite(f(next)))
      throw DivergedError(next);
    double step = std::fabs(next - x);
    x = next;
    if (step < cfg.tol) return {x, k + 1, true};
  }
  return {x, cfg.max_iters, false};
}

// ---- primitive registry & service execution ----

using PrimitiveFn = std::function<TypedValue(const std::vector<TypedValue>&)>;

struct Primitive {
  ServiceSignature signature;
  PrimitiveFn fn;
};

// Executable implementations of package functions, keyed by
// (package id, function name). Stand-in for loading script code.
class PrimitiveRegistry {
 public:
  void add(const std::string& package_id, const std::string& name,
           ServiceSignature signature, PrimitiveFn fn) {
    table_[key(package_id, name)] = {std::move(signature), std::move(fn)};
  }

  const Primitive* find(const std::string& package_id,
                        const std::string& name) const {
    auto it = table_.find(key(package_id, name));
    return it == table_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return table_.size(); }

 private:
  static std::string key(const std::string& p, const std::string& n) {
    return p + "#" + n;
  }
  std::map<std::string, Primitive> table_;
};

// Evaluates the dependency graph of a service over the given inputs. Nodes
// run in deterministic topological order; each unfed input slot takes the
// corresponding service-level input.
inline TypedValue execute(const Service& s,
                          const std::vector<TypedValue>& inputs,
                          const PrimitiveRegistry& registry) {
  s.validate();
  const auto& sig = s.signature;
  if (inputs.size() != sig.inputs.size())
    throw InputTypeMismatchError(
        std::min(inputs.size(), sig.inputs.size()),
        std::to_string(sig.inputs.size()) + " inputs",
        std::to_string(inputs.size()) + " inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    inputs[i].validate();
    if (inputs[i].dtype != sig.inputs[i])
      throw InputTypeMismatchError(i, type_token(sig.inputs[i]),
                                   type_token(inputs[i].dtype));
  }

  // slot (node, position) -> value
  std::map<std::pair<NodeId, int>, TypedValue> slots;
  const auto& open = s.graph.open_inputs();
  for (std::size_t i = 0; i < open.size(); ++i)
    slots.emplace(std::make_pair(open[i].node, open[i].position), inputs[i]);

  std::map<NodeId, TypedValue> outputs;
  for (NodeId id : s.graph.topo_order()) {
    const DepNode& node = s.graph.nodes()[id];
    const Primitive* prim = registry.find(node.package_id, node.function_name);
    if (!prim) throw MissingPrimitiveError(node.package_id, node.function_name);
    if (static_cast<int>(prim->signature.arity()) != node.arity)
      throw PrimitiveFailureError(
          node.package_id + "#" + node.function_name +
          " declares arity " + std::to_string(prim->signature.arity()) +
          " but the graph expects " + std::to_string(node.arity));

    std::vector<TypedValue> args;
    args.reserve(node.arity);
    for (int p = 0; p < node.arity; ++p) {
      const Edge* feeding = nullptr;
      for (const auto& e : s.graph.edges())
        if (e.to == id && e.position == p) {
          feeding = &e;
          break;
        }
      if (feeding) {
        args.push_back(outputs.at(feeding->from));
      } else {
        auto it = slots.find({id, p});
        if (it == slots.end())
          throw PrimitiveFailureError("unfed input slot with no service input");
        args.push_back(it->second);
      }
    }

    TypedValue result;
    try {
      result = prim->fn(args);
      result.validate();
    } catch (const Error& e) {
      throw PrimitiveFailureError(node.package_id + "#" + node.function_name +
                                  ": " + e.what());
    } catch (const std::exception& e) {
      throw PrimitiveFailureError(node.package_id + "#" + node.function_name +
                                  ": " + e.what());
    }
    if (result.dtype != prim->signature.output)
      throw PrimitiveFailureError(node.package_id + "#" + node.function_name +
                                  " returned " + type_token(result.dtype) +
                                  ", declared " +
                                  type_token(prim->signature.output));
    outputs.emplace(id, std::move(result));
  }

  TypedValue out = outputs.at(s.graph.sink());
  if (out.dtype != sig.output)
    throw PrimitiveFailureError("sink produced " + type_token(out.dtype) +
                                ", service declares " +
                                type_token(sig.output));
  return out;
}

}  // namespace zoo
