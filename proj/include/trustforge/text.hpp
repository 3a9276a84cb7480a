// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Small text helpers used by every file format in the project.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trustforge::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_int(std::string_view token);

std::vector<std::string_view> split(std::string_view line, char delimiter);
std::vector<std::string_view> split_whitespace(std::string_view line);

std::string_view trim(std::string_view s);

}  // namespace trustforge::text
