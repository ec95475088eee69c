/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "hcbb/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace hcbb::model {

namespace {

enum class TokKind { Ident, Number, Symbol, EndOfStatement, EndOfInput };

struct Token {
  TokKind kind;
  std::string text;
  double number = 0.0;
  int line = 0;
  int column = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { scan(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    scan();
    return t;
  }

 private:
  void scan() {
    skip_space_and_comments();
    const int line = line_;
    const int column = column_;
    if (pos_ >= text_.size()) {
      current_ = {TokKind::EndOfInput, "", 0.0, line, column};
      return;
    }
    const char c = text_[pos_];
    if (c == '\n' || c == ';') {
      consume();
      current_ = {TokKind::EndOfStatement, std::string(1, c), 0.0, line, column};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string ident;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ident += text_[pos_];
        consume();
      }
      current_ = {TokKind::Ident, ident, 0.0, line, column};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        consume();
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        const std::size_t save_pos = pos_;
        const int save_line = line_, save_col = column_;
        consume();
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) consume();
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            consume();
        } else {
          pos_ = save_pos;
          line_ = save_line;
          column_ = save_col;
        }
      }
      const std::string num(text_.substr(start, pos_ - start));
      char* end = nullptr;
      const double value = std::strtod(num.c_str(), &end);
      if (end != num.c_str() + num.size())
        throw ParseError("malformed number '" + num + "'", line, column);
      current_ = {TokKind::Number, num, value, line, column};
      return;
    }
    if (c == '<' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
      consume();
      consume();
      current_ = {TokKind::Symbol, "<=", 0.0, line, column};
      return;
    }
    static const std::string singles = "+-*/^()[],:=";
    if (singles.find(c) != std::string::npos) {
      consume();
      current_ = {TokKind::Symbol, std::string(1, c), 0.0, line, column};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, column);
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') consume();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        consume();
      } else {
        break;
      }
    }
  }

  void consume() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  Token current_;
};

struct VarDecl {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 1.0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  MinlpProblem run() {
    // Pass 1 collects declarations so expressions can resolve final indices
    // (continuous block first, then the binary block).
    collect_declarations();
    MinlpProblem prob;
    for (const VarDecl& d : decls_) prob.variables.push_back({d.name, d.kind, d.lower, d.upper});
    parse_body(prob);
    prob.validate();
    return prob;
  }

 private:
  void collect_declarations() {
    Lexer lex(text_);
    bool at_statement_start = true;
    while (lex.peek().kind != TokKind::EndOfInput) {
      if (lex.peek().kind == TokKind::EndOfStatement) {
        lex.next();
        at_statement_start = true;
        continue;
      }
      if (at_statement_start && lex.peek().kind == TokKind::Ident && lex.peek().text == "var") {
        lex.next();
        parse_var_decl(lex);
      } else {
        lex.next();
      }
      at_statement_start = false;
    }
    std::vector<VarDecl> ordered;
    for (const VarDecl& d : decls_)
      if (d.kind == VarKind::Continuous) ordered.push_back(d);
    for (const VarDecl& d : decls_)
      if (d.kind == VarKind::Binary) ordered.push_back(d);
    decls_ = std::move(ordered);
    for (std::size_t i = 0; i < decls_.size(); ++i) index_[decls_[i].name] = static_cast<int>(i);
  }

  void parse_var_decl(Lexer& lex) {
    Token name = lex.next();
    if (name.kind != TokKind::Ident)
      throw ParseError("expected variable name", name.line, name.column);
    if (name.text == "exp" || name.text == "log" || name.text == "sqrt" || name.text == "abs")
      throw SemanticError("variable name '" + name.text + "' shadows a function");
    for (const VarDecl& d : decls_)
      if (d.name == name.text) throw SemanticError("duplicate variable '" + name.text + "'");
    Token kind = lex.next();
    VarDecl decl;
    decl.name = name.text;
    if (kind.kind == TokKind::Ident && kind.text == "bin") {
      decl.kind = VarKind::Binary;
    } else if (kind.kind == TokKind::Ident && kind.text == "cont") {
      decl.kind = VarKind::Continuous;
      expect_symbol(lex, "[");
      decl.lower = parse_signed_number(lex);
      expect_symbol(lex, ",");
      decl.upper = parse_signed_number(lex);
      expect_symbol(lex, "]");
      if (decl.lower > decl.upper)
        throw SemanticError("variable " + decl.name + ": lower bound exceeds upper bound");
    } else {
      throw ParseError("expected 'cont' or 'bin'", kind.line, kind.column);
    }
    decls_.push_back(decl);
  }

  void parse_body(MinlpProblem& prob) {
    Lexer lex(text_);
    bool have_objective = false;
    while (lex.peek().kind != TokKind::EndOfInput) {
      if (lex.peek().kind == TokKind::EndOfStatement) {
        lex.next();
        continue;
      }
      Token head = lex.next();
      if (head.kind != TokKind::Ident)
        throw ParseError("expected statement keyword 'var', 'min' or 'st'", head.line,
                         head.column);
      if (head.text == "var") {
        skip_statement(lex);
      } else if (head.text == "min") {
        if (have_objective) throw SemanticError("multiple objectives");
        if (at_statement_end(lex))
          throw ParseError("empty objective", head.line, head.column);
        prob.objective = parse_expr(lex);
        expect_statement_end(lex);
        have_objective = true;
      } else if (head.text == "st") {
        parse_constraint(lex, prob);
      } else {
        throw ParseError("unknown statement '" + head.text + "'", head.line, head.column);
      }
    }
    if (!have_objective) throw SemanticError("no objective ('min' statement) found");
  }

  void parse_constraint(Lexer& lex, MinlpProblem& prob) {
    Token label = lex.next();
    if (label.kind != TokKind::Ident)
      throw ParseError("expected constraint label", label.line, label.column);
    expect_symbol(lex, ":");
    if (at_statement_end(lex))
      throw ParseError("empty constraint expression", label.line, label.column);
    Expression e = parse_expr(lex);
    Token rel = lex.next();
    if (rel.kind != TokKind::Symbol || (rel.text != "=" && rel.text != "<="))
      throw ParseError("expected '= 0' or '<= 0' after constraint expression", rel.line,
                       rel.column);
    Token zero = lex.next();
    if (zero.kind != TokKind::Number || zero.number != 0.0)
      throw ParseError("constraint right-hand side must be 0", zero.line, zero.column);
    expect_statement_end(lex);
    for (const auto& l : prob.equality_labels)
      if (l == label.text) throw SemanticError("duplicate constraint label '" + label.text + "'");
    for (const auto& l : prob.inequality_labels)
      if (l == label.text) throw SemanticError("duplicate constraint label '" + label.text + "'");
    if (rel.text == "=") {
      prob.equalities.push_back(e);
      prob.equality_labels.push_back(label.text);
    } else {
      prob.inequalities.push_back(e);
      prob.inequality_labels.push_back(label.text);
    }
  }

  static bool at_statement_end(Lexer& lex) {
    return lex.peek().kind == TokKind::EndOfStatement || lex.peek().kind == TokKind::EndOfInput;
  }

  void expect_statement_end(Lexer& lex) {
    if (!at_statement_end(lex))
      throw ParseError("trailing tokens after statement", lex.peek().line, lex.peek().column);
    if (lex.peek().kind == TokKind::EndOfStatement) lex.next();
  }

  void skip_statement(Lexer& lex) {
    while (!at_statement_end(lex)) lex.next();
  }

  double parse_signed_number(Lexer& lex) {
    double sign = 1.0;
    while (lex.peek().kind == TokKind::Symbol &&
           (lex.peek().text == "-" || lex.peek().text == "+")) {
      if (lex.next().text == "-") sign = -sign;
    }
    Token t = lex.next();
    if (t.kind != TokKind::Number) throw ParseError("expected number", t.line, t.column);
    return sign * t.number;
  }

  void expect_symbol(Lexer& lex, const std::string& sym) {
    Token t = lex.next();
    if (t.kind != TokKind::Symbol || t.text != sym)
      throw ParseError("expected '" + sym + "'", t.line, t.column);
  }

  // expr := term (('+'|'-') term)*
  Expression parse_expr(Lexer& lex) {
    Expression e = parse_term(lex);
    while (lex.peek().kind == TokKind::Symbol &&
           (lex.peek().text == "+" || lex.peek().text == "-")) {
      const std::string op = lex.next().text;
      Expression rhs = parse_term(lex);
      e = op == "+" ? e + rhs : e - rhs;
    }
    return e;
  }

  // term := factor (('*'|'/') factor)*
  Expression parse_term(Lexer& lex) {
    Expression e = parse_factor(lex);
    while (lex.peek().kind == TokKind::Symbol &&
           (lex.peek().text == "*" || lex.peek().text == "/")) {
      const std::string op = lex.next().text;
      Expression rhs = parse_factor(lex);
      e = op == "*" ? e * rhs : e / rhs;
    }
    return e;
  }

  // factor := ('-'|'+')* power
  Expression parse_factor(Lexer& lex) {
    if (lex.peek().kind == TokKind::Symbol && lex.peek().text == "-") {
      lex.next();
      return -parse_factor(lex);
    }
    if (lex.peek().kind == TokKind::Symbol && lex.peek().text == "+") {
      lex.next();
      return parse_factor(lex);
    }
    return parse_power(lex);
  }

  // power := atom ('^' factor)?   right-associative
  Expression parse_power(Lexer& lex) {
    Expression base = parse_atom(lex);
    if (lex.peek().kind == TokKind::Symbol && lex.peek().text == "^") {
      lex.next();
      Expression exponent = parse_factor(lex);
      return pow(base, exponent);
    }
    return base;
  }

  Expression parse_atom(Lexer& lex) {
    Token t = lex.next();
    if (t.kind == TokKind::Number) return Expression::constant(t.number);
    if (t.kind == TokKind::Symbol && t.text == "(") {
      Expression e = parse_expr(lex);
      expect_symbol(lex, ")");
      return e;
    }
    if (t.kind == TokKind::Ident) {
      if (t.text == "exp" || t.text == "log" || t.text == "sqrt" || t.text == "abs") {
        expect_symbol(lex, "(");
        Expression arg = parse_expr(lex);
        expect_symbol(lex, ")");
        if (t.text == "exp") return exp(arg);
        if (t.text == "log") return log(arg);
        if (t.text == "sqrt") return sqrt(arg);
        return smooth_abs(arg);
      }
      auto it = index_.find(t.text);
      if (it == index_.end()) throw SemanticError("unknown identifier '" + t.text + "'");
      return Expression::variable(it->second);
    }
    throw ParseError("expected expression", t.line, t.column);
  }

  std::string_view text_;
  std::vector<VarDecl> decls_;
  std::map<std::string, int> index_;
};

}  // namespace

MinlpProblem parse_problem(std::string_view text) { return Parser(text).run(); }

MinlpProblem parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

}  // namespace hcbb::model
