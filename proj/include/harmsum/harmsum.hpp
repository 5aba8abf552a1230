// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "harmsum/analysis.hpp"
#include "harmsum/core.hpp"
#include "harmsum/engines.hpp"
#include "harmsum/io.hpp"
#include "harmsum/memory.hpp"
#include "harmsum/reorder.hpp"
#include "harmsum/runner.hpp"
