#pragma once

// Umbrella header.

#include "ccdispatch/config.hpp"
#include "ccdispatch/error.hpp"
#include "ccdispatch/forecast.hpp"
#include "ccdispatch/lp/dispatch.hpp"
#include "ccdispatch/lp/instance.hpp"
#include "ccdispatch/lp/mps.hpp"
#include "ccdispatch/lp/simplex.hpp"
#include "ccdispatch/model.hpp"
#include "ccdispatch/normal.hpp"
#include "ccdispatch/parallel.hpp"
#include "ccdispatch/policy.hpp"
#include "ccdispatch/rng.hpp"
#include "ccdispatch/search.hpp"
#include "ccdispatch/sim.hpp"
