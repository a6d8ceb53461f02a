#pragma once

// Umbrella header: the whole library.

#include "order.hpp"     // IWYU pragma: export
#include "pool.hpp"      // IWYU pragma: export
#include "pooled.hpp"    // IWYU pragma: export
#include "rng.hpp"       // IWYU pragma: export
#include "ruin.hpp"      // IWYU pragma: export
#include "scenario.hpp"  // IWYU pragma: export
#include "severity.hpp"  // IWYU pragma: export
#include "special.hpp"   // IWYU pragma: export
