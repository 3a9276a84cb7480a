// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "trustforge/types.hpp"

#include <string>

#include "trustforge/error.hpp"

namespace trustforge {

std::string_view to_string(TrustClass c) {
  return c == TrustClass::Trustworthy ? "Trustworthy" : "Untrustworthy";
}

std::string_view to_string(TrustSource s) {
  switch (s) {
    case TrustSource::Original: return "Original";
    case TrustSource::Outlier: return "Outlier";
    case TrustSource::RWI: return "RWI";
    case TrustSource::Drift: return "Drift";
  }
  return "Original";
}

TrustClass parse_trust_class(std::string_view text) {
  if (text == "Trustworthy") return TrustClass::Trustworthy;
  if (text == "Untrustworthy") return TrustClass::Untrustworthy;
  throw FormatError("unknown label class '" + std::string(text) + "'");
}

TrustSource parse_trust_source(std::string_view text) {
  if (text == "Original") return TrustSource::Original;
  if (text == "Outlier") return TrustSource::Outlier;
  if (text == "RWI") return TrustSource::RWI;
  if (text == "Drift") return TrustSource::Drift;
  throw FormatError("unknown label source '" + std::string(text) + "'");
}

Eigen::Index RegularSeries::non_gap_count() const {
  Eigen::Index n = 0;
  for (bool g : gap) n += g ? 0 : 1;
  return n;
}

}  // namespace trustforge
