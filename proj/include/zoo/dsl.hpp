#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zoo/backend.hpp"
#include "zoo/errors.hpp"
#include "zoo/service.hpp"
#include "zoo/store.hpp"
#include "zoo/typecheck.hpp"

namespace zoo::dsl {

// ---- AST ----

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Acquire, GetItem, ComposeList, Deploy, Var };

  Kind kind = Kind::Var;
  int line = 0, col = 0;

  std::string text;            // Acquire: ref string; GetItem: name; Var: ident
  ExprPtr base;                // GetItem / Deploy operand, ComposeList consumer
  std::vector<ExprPtr> parts;  // ComposeList producers
  BackendSpec backend;         // Deploy
  bool explicit_list = false;  // ComposeList written with [..] brackets
};

// Top-level statement: let <name> = <expr>;;
struct Let {
  std::string name;
  ExprPtr value;
  int line = 0, col = 0;
};

using Program = std::vector<Let>;

// ---- lexer ----

namespace detail {

enum class Tok {
  Let, Ident, Equals, Dollar, Hash, LBracket, RBracket, Semi, SemiSemi,
  Compose, Deploy, String, End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // ident name or string value
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (eof()) {
        out.push_back({Tok::End, "", line_, col_});
        return out;
      }
      int line = line_, col = col_;
      char c = peek();
      if (c == '$') {
        advance();
        if (!eof() && peek() == '>') {
          advance();
          out.push_back({Tok::Compose, "$>", line, col});
        } else if (!eof() && peek() == '@') {
          advance();
          out.push_back({Tok::Deploy, "$@", line, col});
        } else {
          out.push_back({Tok::Dollar, "$", line, col});
        }
      } else if (c == '#') {
        advance();
        out.push_back({Tok::Hash, "#", line, col});
      } else if (c == '[') {
        advance();
        out.push_back({Tok::LBracket, "[", line, col});
      } else if (c == ']') {
        advance();
        out.push_back({Tok::RBracket, "]", line, col});
      } else if (c == ';') {
        advance();
        if (!eof() && peek() == ';') {
          advance();
          out.push_back({Tok::SemiSemi, ";;", line, col});
        } else {
          out.push_back({Tok::Semi, ";", line, col});
        }
      } else if (c == '=') {
        advance();
        out.push_back({Tok::Equals, "=", line, col});
      } else if (c == '"') {
        out.push_back(lex_string(line, col));
      } else if (is_ident_start(c)) {
        std::string word;
        while (!eof() && is_ident_char(peek())) word.push_back(advance());
        out.push_back({word == "let" ? Tok::Let : Tok::Ident, word, line, col});
      } else {
        throw SyntaxError(line, col,
                          std::string("unexpected character '") + c + "'");
      }
    }
  }

 private:
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
  }

  Token lex_string(int line, int col) {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (eof()) throw UnterminatedStringError(line, col);
      char c = advance();
      if (c == '"') return {Tok::String, value, line, col};
      if (c == '\\') {
        if (eof()) throw UnterminatedStringError(line, col);
        char esc = advance();
        if (esc == '"' || esc == '\\')
          value.push_back(esc);
        else
          throw SyntaxError(line_, col_ - 2,
                            std::string("unsupported escape '\\") + esc + "'");
      } else {
        value.push_back(c);
      }
    }
  }

  void skip_space_and_comments() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '(' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        int line = line_, col = col_;
        advance();
        advance();
        int depth = 1;  // (* *) comments nest
        while (depth > 0) {
          if (eof()) throw SyntaxError(line, col, "unterminated comment");
          char d = advance();
          if (d == '(' && !eof() && peek() == '*') {
            advance();
            ++depth;
          } else if (d == '*' && !eof() && peek() == ')') {
            advance();
            --depth;
          }
        }
      } else {
        return;
      }
    }
  }

  bool eof() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

}  // namespace detail

// ---- parser ----
//
// program := stmt*
// stmt    := "let" ident "=" expr ";;"
// expr    := "$" strlit | expr "#" strlit
//          | "[" expr (";" expr)* "]" "$>" expr | expr "$>" expr
//          | expr "$@" backend | ident
// backend := ("CONTAINER"|"SCRIPT"|"UNIKERNEL") strlit
//
// "#" binds tighter than "$>", which binds tighter than "$@"; "$>" is
// left-associative, and a bare left operand is sugar for a singleton list.
class Parser {
 public:
  explicit Parser(const std::string& src)
      : tokens_(detail::Lexer(src).run()) {}

  Program parse_program() {
    Program prog;
    while (peek().kind != detail::Tok::End) {
      Let stmt;
      auto let_tok = expect(detail::Tok::Let, "expected 'let'");
      stmt.line = let_tok.line;
      stmt.col = let_tok.col;
      stmt.name = expect(detail::Tok::Ident, "expected identifier").text;
      expect(detail::Tok::Equals, "expected '='");
      stmt.value = parse_expr();
      expect(detail::Tok::SemiSemi, "expected ';;'");
      prog.push_back(std::move(stmt));
    }
    return prog;
  }

  ExprPtr parse_expr() { return parse_deploy(); }

 private:
  ExprPtr parse_deploy() {
    ExprPtr e = parse_compose();
    while (peek().kind == detail::Tok::Deploy) {
      auto op = next();
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::Deploy;
      node->line = op.line;
      node->col = op.col;
      node->base = e;
      node->backend = parse_backend();
      e = node;
    }
    return e;
  }

  ExprPtr parse_compose() {
    ExprPtr e;
    bool was_list = false;
    std::vector<ExprPtr> list;
    int list_line = 0, list_col = 0;

    if (peek().kind == detail::Tok::LBracket) {
      auto open = next();
      list_line = open.line;
      list_col = open.col;
      was_list = true;
      list.push_back(parse_expr());
      while (peek().kind == detail::Tok::Semi) {
        next();
        list.push_back(parse_expr());
      }
      expect(detail::Tok::RBracket, "expected ']' or ';'");
    } else {
      e = parse_get_item();
    }

    bool first = true;
    while (peek().kind == detail::Tok::Compose || (was_list && first)) {
      auto op = expect(detail::Tok::Compose,
                       "a service list must be composed with '$>'");
      if (peek().kind == detail::Tok::LBracket)
        throw SyntaxError(peek().line, peek().col,
                          "a service list cannot be a composition target");
      ExprPtr consumer = parse_get_item();
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::ComposeList;
      node->line = first && was_list ? list_line : op.line;
      node->col = first && was_list ? list_col : op.col;
      if (first && was_list) {
        node->parts = list;
        node->explicit_list = true;
      } else {
        node->parts = {e};  // singleton sugar
      }
      node->base = consumer;
      e = node;
      first = false;
    }
    return e;
  }

  ExprPtr parse_get_item() {
    ExprPtr e = parse_primary();
    while (peek().kind == detail::Tok::Hash) {
      auto op = next();
      auto name = expect(detail::Tok::String, "expected a service name string");
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::GetItem;
      node->line = op.line;
      node->col = op.col;
      node->base = e;
      node->text = name.text;
      e = node;
    }
    return e;
  }

  ExprPtr parse_primary() {
    auto tok = peek();
    if (tok.kind == detail::Tok::Dollar) {
      next();
      auto ref = expect(detail::Tok::String, "expected a package id string");
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::Acquire;
      node->line = tok.line;
      node->col = tok.col;
      node->text = ref.text;
      return node;
    }
    if (tok.kind == detail::Tok::Ident) {
      next();
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::Var;
      node->line = tok.line;
      node->col = tok.col;
      node->text = tok.text;
      return node;
    }
    throw SyntaxError(tok.line, tok.col, "expected an expression");
  }

  BackendSpec parse_backend() {
    auto kw = peek();
    if (kw.kind != detail::Tok::Ident)
      throw SyntaxError(kw.line, kw.col, "expected a backend keyword");
    next();
    BackendSpec spec;
    if (kw.text == "CONTAINER")
      spec.kind = BackendKind::Container;
    else if (kw.text == "SCRIPT")
      spec.kind = BackendKind::Script;
    else if (kw.text == "UNIKERNEL")
      spec.kind = BackendKind::Unikernel;
    else
      throw UnknownBackendKeywordError(kw.line, kw.col, kw.text);
    auto target = expect(detail::Tok::String, "expected a backend target string");
    if (target.text.empty())
      throw SyntaxError(target.line, target.col,
                        "backend target must be non-empty");
    spec.target = target.text;
    return spec;
  }

  const detail::Token& peek() const { return tokens_[pos_]; }
  detail::Token next() { return tokens_[pos_++]; }
  detail::Token expect(detail::Tok kind, const std::string& message) {
    if (peek().kind != kind)
      throw SyntaxError(peek().line, peek().col,
                        message + ", got \"" + describe(peek()) + "\"");
    return next();
  }

  static std::string describe(const detail::Token& t) {
    if (t.kind == detail::Tok::End) return "end of input";
    if (t.kind == detail::Tok::String) return "\"" + t.text + "\"";
    return t.text;
  }

  std::vector<detail::Token> tokens_;
  std::size_t pos_ = 0;
};

inline Program parse(const std::string& src) {
  return Parser(src).parse_program();
}

// ---- printer ----

namespace detail {

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

inline std::string print(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Acquire:
      return "$ " + detail::quote(e->text);
    case Expr::Kind::Var:
      return e->text;
    case Expr::Kind::GetItem:
      return print(e->base) + " # " + detail::quote(e->text);
    case Expr::Kind::ComposeList: {
      std::string lhs;
      // A singleton may drop its brackets unless the element is a Deploy,
      // which binds looser than $> and would reparse differently.
      if (e->parts.size() == 1 && e->parts[0]->kind != Expr::Kind::Deploy) {
        lhs = print(e->parts[0]);
      } else {
        lhs = "[";
        for (std::size_t i = 0; i < e->parts.size(); ++i) {
          if (i) lhs += "; ";
          lhs += print(e->parts[i]);
        }
        lhs += "]";
      }
      return lhs + " $> " + print(e->base);
    }
    case Expr::Kind::Deploy: {
      std::string kw = e->backend.kind == BackendKind::Container ? "CONTAINER"
                       : e->backend.kind == BackendKind::Script  ? "SCRIPT"
                                                                 : "UNIKERNEL";
      return print(e->base) + " $@ " + kw + " " +
             detail::quote(e->backend.target);
    }
  }
  return "";
}

inline std::string print(const Program& prog) {
  std::string out;
  for (const auto& stmt : prog)
    out += "let " + stmt.name + " = " + print(stmt.value) + ";;\n";
  return out;
}

// Structural equality modulo source locations and list sugar.
inline bool same_ast(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Acquire:
    case Expr::Kind::Var:
      return a->text == b->text;
    case Expr::Kind::GetItem:
      return a->text == b->text && same_ast(a->base, b->base);
    case Expr::Kind::ComposeList: {
      if (a->parts.size() != b->parts.size()) return false;
      for (std::size_t i = 0; i < a->parts.size(); ++i)
        if (!same_ast(a->parts[i], b->parts[i])) return false;
      return same_ast(a->base, b->base);
    }
    case Expr::Kind::Deploy:
      return a->backend == b->backend && same_ast(a->base, b->base);
  }
  return false;
}

inline bool same_ast(const Program& a, const Program& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !same_ast(a[i].value, b[i].value))
      return false;
  return true;
}

// ---- evaluator ----

using Value = std::variant<Service, ServiceDict, std::string>;

struct Environment {
  std::map<std::string, Value> bindings;
  std::vector<std::string> order;  // insertion order, for printing

  void bind(const std::string& name, Value v) {
    if (bindings.find(name) == bindings.end()) order.push_back(name);
    bindings[name] = std::move(v);
  }

  const Value* lookup(const std::string& name) const {
    auto it = bindings.find(name);
    return it == bindings.end() ? nullptr : &it->second;
  }
};

namespace detail {

template <class E>
[[noreturn]] inline void rethrow_at(E e, int line, int col) {
  e.set_location(line, col);
  throw e;
}

}  // namespace detail

// Strict, statement-ordered evaluation. Composition and publish errors are
// re-raised with the source location of the offending expression.
class Evaluator {
 public:
  Evaluator(PackageStore& store, Publisher& publisher, std::int64_t now = 0)
      : store_(store), publisher_(publisher), now_(now) {}

  Environment eval(const Program& prog, Environment env = {}) {
    for (const auto& stmt : prog) env.bind(stmt.name, eval_expr(stmt.value, env));
    return env;
  }

  Value eval_expr(const ExprPtr& e, const Environment& env) {
    switch (e->kind) {
      case Expr::Kind::Acquire:
        return locate(e, [&]() -> Value {
          return create_service(VersionRef::parse(e->text), store_, now_);
        });
      case Expr::Kind::Var: {
        const Value* v = env.lookup(e->text);
        if (!v) throw UnboundIdentifierError(e->text, e->line, e->col);
        return *v;
      }
      case Expr::Kind::GetItem:
        return locate(e, [&]() -> Value {
          Value base = eval_expr(e->base, env);
          auto* dict = std::get_if<ServiceDict>(&base);
          if (!dict)
            throw EvalError("'#' expects the package dictionary from '$'");
          auto it = dict->find(e->text);
          if (it == dict->end()) throw KeyNotFoundError(e->text);
          return it->second;
        });
      case Expr::Kind::ComposeList:
        return locate(e, [&]() -> Value {
          std::vector<Service> producers;
          producers.reserve(e->parts.size());
          for (const auto& part : e->parts)
            producers.push_back(expect_service(part, env));
          Service consumer = expect_service(e->base, env);
          return compose(producers, consumer);
        });
      case Expr::Kind::Deploy:
        return locate(e, [&]() -> Value {
          Service svc = expect_service(e->base, env);
          return publisher_.publish(svc, e->backend);
        });
    }
    throw EvalError("unreachable expression kind");
  }

 private:
  Service expect_service(const ExprPtr& e, const Environment& env) {
    Value v = eval_expr(e, env);
    if (auto* svc = std::get_if<Service>(&v)) return std::move(*svc);
    if (std::holds_alternative<ServiceDict>(v))
      detail::rethrow_at(
          EvalError("expected a service, got a package dictionary "
                    "(select one with '#')"),
          e->line, e->col);
    detail::rethrow_at(EvalError("expected a service, got a URI string"),
                       e->line, e->col);
  }

  template <class Fn>
  Value locate(const ExprPtr& e, Fn body) {
    try {
      return body();
    } catch (TypeMismatchError& err) {
      detail::rethrow_at(err, e->line, e->col);
    } catch (ArityMismatchError& err) {
      detail::rethrow_at(err, e->line, e->col);
    } catch (KeyNotFoundError& err) {
      detail::rethrow_at(err, e->line, e->col);
    } catch (UnknownTypeError& err) {
      detail::rethrow_at(err, e->line, e->col);
    } catch (InvalidRefError& err) {
      detail::rethrow_at(err, e->line, e->col);
    } catch (PackageNotFoundError& err) {
      detail::rethrow_at(err, e->line, e->col);
    } catch (UnpinnedDependencyError& err) {
      detail::rethrow_at(err, e->line, e->col);
    } catch (EvalError& err) {
      detail::rethrow_at(err, e->line, e->col);
    }
  }

  PackageStore& store_;
  Publisher& publisher_;
  std::int64_t now_;
};

}  // namespace zoo::dsl
