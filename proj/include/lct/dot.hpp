// Copyright 2026 The lct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#pragma once

// Minimal GraphViz DOT reader/writer. Covers the subset emitted by automata
// learning tools and by this library: node and edge statements with
// attribute lists, edge chains, graph/node/edge default statements (ignored),
// subgraph braces (flattened) and the three comment styles.

#include <lct/error.hpp>

#include <cctype>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lct::dot {

using Attributes = std::map<std::string, std::string>;

struct Node {
  std::string id;
  Attributes attrs;
  std::size_t line = 0;
};

struct Edge {
  std::string from;
  std::string to;
  Attributes attrs;
  std::size_t line = 0;
};

struct Graph {
  std::string name;
  bool directed = true;
  std::vector<Node> nodes;  // first-mention order
  std::vector<Edge> edges;

  const Node* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &nodes[it->second];
  }

  Node& touch(const std::string& id, std::size_t line) {
    auto [it, inserted] = index_.try_emplace(id, nodes.size());
    if (inserted) nodes.push_back(Node{id, {}, line});
    return nodes[it->second];
  }

 private:
  std::map<std::string, std::size_t> index_;
};

namespace detail {

enum class Tok { Id, LBrace, RBrace, LBracket, RBracket, Semi, Comma, Equals, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip();
    if (pos_ >= text_.size()) return {Tok::End, "", line_, col()};
    const std::size_t line = line_, column = col();
    const char c = text_[pos_];
    auto single = [&](Tok k) {
      ++pos_;
      return Token{k, std::string(1, c), line, column};
    };
    switch (c) {
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case ';': return single(Tok::Semi);
      case ',': return single(Tok::Comma);
      case '=': return single(Tok::Equals);
      default: break;
    }
    if (at_arrow()) {
      pos_ += 2;
      return {Tok::Arrow, "->", line, column};
    }
    if (c == '"') return quoted(line, column);
    if (is_id_char(c)) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && is_id_char(text_[pos_]) && !at_arrow()) ++pos_;
      return {Tok::Id, std::string(text_.substr(start, pos_ - start)), line, column};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, column);
  }

 private:
  static bool is_id_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '.' || c == '-' || u >= 0x80;
  }

  bool at_arrow() const {
    return text_[pos_] == '-' && pos_ + 1 < text_.size() &&
           (text_[pos_ + 1] == '>' || text_[pos_ + 1] == '-');
  }

  std::size_t col() const { return pos_ - line_start_ + 1; }

  void newline() {
    ++line_;
    line_start_ = pos_ + 1;
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        newline();
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#' && pos_ == line_start_) {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (text_.substr(pos_, 2) == "//") {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (text_.substr(pos_, 2) == "/*") {
        const std::size_t line = line_, column = col();
        pos_ += 2;
        while (pos_ < text_.size() && text_.substr(pos_, 2) != "*/") {
          if (text_[pos_] == '\n') newline();
          ++pos_;
        }
        if (pos_ >= text_.size()) throw ParseError("unterminated comment", line, column);
        pos_ += 2;
      } else {
        break;
      }
    }
  }

  Token quoted(std::size_t line, std::size_t column) {
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) throw ParseError("unterminated string", line, column);
      const char c = text_[pos_];
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\\' && pos_ + 1 < text_.size()) {
        const char n = text_[pos_ + 1];
        if (n == '"' || n == '\\') {
          out += n;
          pos_ += 2;
          continue;
        }
        if (n == '\n') {  // line continuation
          pos_ += 2;
          newline();
          line_start_ = pos_;
          continue;
        }
      }
      if (c == '\n') newline();
      out += c;
      ++pos_;
    }
    return {Tok::Id, out, line, column};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { advance(); }

  Graph parse() {
    Graph g;
    if (tok_.kind == Tok::Id && tok_.text == "strict") advance();
    if (tok_.kind != Tok::Id || (tok_.text != "digraph" && tok_.text != "graph"))
      fail("expected 'digraph' or 'graph'");
    g.directed = tok_.text == "digraph";
    advance();
    if (tok_.kind == Tok::Id) {
      g.name = tok_.text;
      advance();
    }
    expect(Tok::LBrace, "'{'");
    statements(g);
    expect(Tok::RBrace, "'}'");
    if (tok_.kind != Tok::End) fail("trailing content after graph");
    return g;
  }

 private:
  void statements(Graph& g) {
    while (tok_.kind != Tok::RBrace && tok_.kind != Tok::End) {
      statement(g);
      if (tok_.kind == Tok::Semi || tok_.kind == Tok::Comma) advance();
    }
  }

  void statement(Graph& g) {
    if (tok_.kind == Tok::LBrace) {  // anonymous subgraph
      advance();
      statements(g);
      expect(Tok::RBrace, "'}'");
      return;
    }
    if (tok_.kind != Tok::Id) fail("expected statement");
    const Token head = tok_;
    advance();
    if (head.text == "subgraph") {
      if (tok_.kind == Tok::Id) advance();
      expect(Tok::LBrace, "'{'");
      statements(g);
      expect(Tok::RBrace, "'}'");
      return;
    }
    if (head.text == "graph" || head.text == "node" || head.text == "edge") {
      if (tok_.kind == Tok::LBracket) attributes();
      return;
    }
    if (tok_.kind == Tok::Equals) {  // graph attribute such as rankdir=LR
      advance();
      if (tok_.kind != Tok::Id) fail("expected attribute value");
      advance();
      return;
    }
    std::vector<std::string> chain{head.text};
    g.touch(head.text, head.line);
    while (tok_.kind == Tok::Arrow) {
      advance();
      if (tok_.kind != Tok::Id) fail("expected node identifier after '->'");
      chain.push_back(tok_.text);
      g.touch(tok_.text, tok_.line);
      advance();
    }
    Attributes attrs;
    if (tok_.kind == Tok::LBracket) attrs = attributes();
    if (chain.size() == 1) {
      for (auto& [k, v] : attrs) g.touch(head.text, head.line).attrs[k] = v;
      return;
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
      g.edges.push_back(Edge{chain[i], chain[i + 1], attrs, head.line});
  }

  Attributes attributes() {
    Attributes attrs;
    expect(Tok::LBracket, "'['");
    while (tok_.kind != Tok::RBracket) {
      if (tok_.kind != Tok::Id) fail("expected attribute name");
      std::string key = tok_.text;
      advance();
      std::string value = "true";
      if (tok_.kind == Tok::Equals) {
        advance();
        if (tok_.kind != Tok::Id) fail("expected attribute value");
        value = tok_.text;
        advance();
      }
      attrs[key] = value;
      if (tok_.kind == Tok::Comma || tok_.kind == Tok::Semi) advance();
      if (tok_.kind == Tok::End) fail("unterminated attribute list");
    }
    advance();
    return attrs;
  }

  void advance() { tok_ = lex_.next(); }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    advance();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + (tok_.kind == Tok::End ? " at end of input" : ", found '" + tok_.text + "'"),
                     tok_.line, tok_.column);
  }

  Lexer lex_;
  Token tok_{Tok::End, "", 0, 0};
};

}  // namespace detail

inline Graph read(std::string_view text) { return detail::Parser(text).parse(); }

/// Quotes a string as a DOT identifier; only '"' and '\' are escaped.
inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace lct::dot
