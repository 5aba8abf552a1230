// SPDX-License-Identifier: Apache-2.0
//
// analysis.hpp
//
// Touch-frequency maps, closed-form access counts and cross-engine verification.

#pragma once

#include "harmsum/gma.hpp"
#include "harmsum/touch_map.hpp"
#include "harmsum/verify.hpp"
