#pragma once

// Umbrella header for the whole library.

#include "ehd/artifact.hpp"
#include "ehd/calib.hpp"
#include "ehd/constants.hpp"
#include "ehd/core.hpp"
#include "ehd/csv.hpp"
#include "ehd/errors.hpp"
#include "ehd/flightdyn.hpp"
#include "ehd/sweep.hpp"
#include "ehd/units.hpp"
