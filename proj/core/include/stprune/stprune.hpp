// SPDX-License-Identifier: Apache-2.0

// Umbrella header.
#pragma once

#include "stprune/config.hpp"
#include "stprune/dump.hpp"
#include "stprune/error.hpp"
#include "stprune/importance.hpp"
#include "stprune/matrix.hpp"
#include "stprune/memory.hpp"
#include "stprune/pipeline.hpp"
#include "stprune/quality.hpp"
#include "stprune/selection_file.hpp"
#include "stprune/selector.hpp"
#include "stprune/similarity.hpp"
#include "stprune/synth.hpp"
#include "stprune/token_set.hpp"
#include "stprune/version.hpp"
