/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <stdexcept>
#include <string>

namespace hcbb {

// Expression evaluation left the domain of an operator (log of a
// non-positive value, division by zero, ...). Carries the offending
// node index within the expression arena.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string what, int node_index)
      : std::runtime_error(std::move(what)), node_index_(node_index) {}
  int node_index() const { return node_index_; }

 private:
  int node_index_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string what, int line, int column)
      : std::runtime_error(std::move(what)), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Structurally valid text whose meaning is inconsistent (duplicate
// variable, unknown identifier, missing objective).
class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class BoundError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The root relaxation could not be solved; branch and bound cannot start.
class RootFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Branching was requested but every binary value is already integral.
class NoFractional : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class TooManyBinaries : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hcbb
