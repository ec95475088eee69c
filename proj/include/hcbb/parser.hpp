/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 hcbb contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <string>
#include <string_view>

#include "hcbb/problem.hpp"

namespace hcbb::model {

// Parses the line-oriented problem text format:
//
//   # comment
//   var <name> cont [<lo>,<hi>]
//   var <name> bin
//   min <expr>
//   st <label>: <expr> = 0
//   st <label>: <expr> <= 0
//
// Statements end at a newline or ';'. Expressions use + - * / ^,
// parentheses, decimal literals and exp(), log(), sqrt(), abs().
// Variables are reordered so the continuous block precedes the binary
// block; expression indices refer to the reordered problem.
MinlpProblem parse_problem(std::string_view text);

MinlpProblem parse_problem_file(const std::string& path);

}  // namespace hcbb::model
