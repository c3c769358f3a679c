// Copyright 2026 The scspec Authors
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

#pragma once

#include <numbers>

namespace scspec::units {

inline constexpr double kPlanck = 6.62607015e-34;          // J s
inline constexpr double kHbar = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kFluxQuantum = kPlanck / (2.0 * kElementaryCharge);  // Wb
inline constexpr double kGHz = 1e9;
inline constexpr double kNano = 1e-9;
inline constexpr double kFemto = 1e-15;

/// Energy in joules -> frequency E/h in GHz.
inline constexpr double joule_to_ghz(double e) { return e / kPlanck / kGHz; }

}  // namespace scspec::units
