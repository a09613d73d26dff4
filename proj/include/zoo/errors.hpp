#pragma once

#include <cstdint>
#include <exception>
#include <string>
#include <utility>

namespace zoo {

// Base class for every domain error raised by the toolkit. The CLI maps any
// zoo::Error to exit code 1; usage errors are handled separately.
class Error : public std::exception {
 public:
  explicit Error(std::string message) : message_(std::move(message)) {}

  const char* what() const noexcept override { return message_.c_str(); }

  // Prefixes the message with a source location, used by the DSL evaluator
  // so composition errors point back at the offending expression.
  void set_location(int line, int col) {
    message_ = "line " + std::to_string(line) + ", col " + std::to_string(col) +
               ": " + message_;
  }

 protected:
  std::string message_;
};

// ---- type system ----

class UnknownTypeError : public Error {
 public:
  explicit UnknownTypeError(std::string token)
      : Error("unknown type \"" + token + "\""), token(std::move(token)) {}
  std::string token;
};

class EmptySignatureError : public Error {
 public:
  EmptySignatureError() : Error("empty type signature") {}
};

// ---- dependency graph ----

class GraphError : public Error {
 public:
  using Error::Error;
};

class CycleError : public GraphError {
 public:
  CycleError() : GraphError("edge insertion would create a cycle") {}
};

class InputAlreadyFedError : public GraphError {
 public:
  InputAlreadyFedError(int node, int position)
      : GraphError("input position " + std::to_string(position) + " of node " +
                   std::to_string(node) + " is already fed") {}
};

// ---- composition ----

class ArityMismatchError : public Error {
 public:
  ArityMismatchError(std::size_t expected, std::size_t found)
      : Error("arity mismatch: consumer expects " + std::to_string(expected) +
              " services, got " + std::to_string(found)),
        expected(expected),
        found(found) {}
  std::size_t expected;
  std::size_t found;
};

// The t_f = t_g check failure. `expected` is the consumer's declared input
// type token, `found` the producer's output type token.
class TypeMismatchError : public Error {
 public:
  TypeMismatchError(std::size_t position, std::string expected,
                    std::string found)
      : Error("type mismatch at position " + std::to_string(position) +
              ": expected " + expected + ", found " + found),
        position(position),
        expected(std::move(expected)),
        found(std::move(found)) {}
  std::size_t position;
  std::string expected;
  std::string found;
};

// ---- package store ----

class InvalidRefError : public Error {
 public:
  explicit InvalidRefError(const std::string& text)
      : Error("invalid package reference \"" + text + "\"") {}
};

class PackageNotFoundError : public Error {
 public:
  PackageNotFoundError(std::string gid, std::string version)
      : Error("package not found: " + gid + "/" + version),
        gid(std::move(gid)),
        version(std::move(version)) {}
  std::string gid;
  std::string version;
};

class RemoteUnavailableError : public Error {
 public:
  explicit RemoteUnavailableError(const std::string& detail)
      : Error("remote source unavailable: " + detail) {}
};

class StoreWriteError : public Error {
 public:
  explicit StoreWriteError(const std::string& detail)
      : Error("store write failed: " + detail) {}
};

class InvalidConfigError : public Error {
 public:
  explicit InvalidConfigError(const std::string& detail)
      : Error("invalid package config: " + detail) {}
};

class PinOnLatestError : public Error {
 public:
  explicit PinOnLatestError(const std::string& gid)
      : Error("cannot pin \"" + gid +
              "/latest\": pinned builds need an explicit version id") {}
};

class GraphMissingError : public Error {
 public:
  GraphMissingError(const std::string& gid, const std::string& vid)
      : Error("no pinned dependency graph for " + gid + "/" + vid) {}
};

// ---- service creation ----

class ConfigMissingError : public Error {
 public:
  ConfigMissingError(const std::string& gid, const std::string& vid)
      : Error("package " + gid + "/" + vid + " has no zoo.json config") {}
};

class ConfigParseError : public Error {
 public:
  explicit ConfigParseError(const std::string& detail)
      : Error("cannot parse zoo.json: " + detail) {}
};

// ---- runtime ----

class ShapeMismatchError : public Error {
 public:
  explicit ShapeMismatchError(const std::string& detail)
      : Error("shape mismatch: " + detail) {}
};

class InputTypeMismatchError : public Error {
 public:
  InputTypeMismatchError(std::size_t position, std::string expected,
                         std::string found)
      : Error("input type mismatch at position " + std::to_string(position) +
              ": expected " + expected + ", found " + found),
        position(position),
        expected(std::move(expected)),
        found(std::move(found)) {}
  std::size_t position;
  std::string expected;
  std::string found;
};

class MissingPrimitiveError : public Error {
 public:
  MissingPrimitiveError(std::string package_id, std::string name)
      : Error("no primitive registered for " + package_id + "#" + name),
        package_id(std::move(package_id)),
        name(std::move(name)) {}
  std::string package_id;
  std::string name;
};

class PrimitiveFailureError : public Error {
 public:
  explicit PrimitiveFailureError(const std::string& detail)
      : Error("primitive failed: " + detail) {}
};

class DivergedError : public Error {
 public:
  explicit DivergedError(double x)
      : Error("gradient descent diverged at x = " + std::to_string(x)) {}
};

// ---- DSL ----

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, const std::string& message)
      : Error("syntax error at line " + std::to_string(line) + ", col " +
              std::to_string(col) + ": " + message),
        line(line),
        col(col) {}
  int line;
  int col;
};

class UnterminatedStringError : public SyntaxError {
 public:
  UnterminatedStringError(int line, int col)
      : SyntaxError(line, col, "unterminated string literal") {}
};

class UnknownBackendKeywordError : public SyntaxError {
 public:
  UnknownBackendKeywordError(int line, int col, const std::string& word)
      : SyntaxError(line, col,
                    "unknown backend \"" + word +
                        "\" (expected CONTAINER, SCRIPT or UNIKERNEL)") {}
};

class UnboundIdentifierError : public Error {
 public:
  UnboundIdentifierError(const std::string& ident, int line, int col)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(col) +
              ": unbound identifier \"" + ident + "\"") {}
};

class KeyNotFoundError : public Error {
 public:
  explicit KeyNotFoundError(std::string name)
      : Error("no service named \"" + name + "\" in this package"),
        name(std::move(name)) {}
  std::string name;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

// ---- publishing / serving ----

class UnpinnedDependencyError : public Error {
 public:
  explicit UnpinnedDependencyError(const std::string& ref)
      : Error("cannot publish with unpinned dependency \"" + ref +
              "\": use an explicit version id") {}
};

class UnknownBackendError : public Error {
 public:
  explicit UnknownBackendError(const std::string& name)
      : Error("unknown backend \"" + name + "\"") {}
};

class WireFormatError : public Error {
 public:
  explicit WireFormatError(const std::string& detail)
      : Error("malformed typed-value encoding: " + detail) {}
};

// ---- discovery ----

class InvalidTypeStringError : public Error {
 public:
  explicit InvalidTypeStringError(const std::string& detail)
      : Error("invalid type string: " + detail) {}
};

class StorageError : public Error {
 public:
  explicit StorageError(const std::string& detail)
      : Error("registry storage failure: " + detail) {}
};

class RecordNotFoundError : public Error {
 public:
  explicit RecordNotFoundError(std::int64_t id)
      : Error("no record with id " + std::to_string(id)) {}
};

// ---- bench ----

class UnknownWorkloadError : public Error {
 public:
  explicit UnknownWorkloadError(const std::string& name)
      : Error("unknown workload \"" + name + "\"") {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& detail)
      : Error("insufficient data for fit: " + detail) {}
};

}  // namespace zoo
