// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Versioned text serialization of trained models.
//
//   trustforge-model 1
//   kind <kind>
//   scalar <name> <value>
//   array <name> <rows> <cols>
//   <rows lines of cols values>
//   end
//
// Reals are written in shortest round-trip form, so save -> load -> predict
// reproduces predictions bit for bit.

#pragma once

#include <istream>
#include <ostream>

#include "trustforge/models.hpp"

namespace trustforge {

inline constexpr int kModelFormatVersion = 1;

void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);

}  // namespace trustforge
