#pragma once

// Umbrella header: joint measurability of two-outcome qubit observables.

#include "qjm/analysis.hpp"
#include "qjm/construction.hpp"
#include "qjm/core.hpp"
#include "qjm/criteria.hpp"
#include "qjm/geometry.hpp"
#include "qjm/sampling.hpp"
#include "qjm/statesim.hpp"
