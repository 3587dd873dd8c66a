#pragma once

// Umbrella header.

#include "clustercast/errors.hpp"
#include "clustercast/config.hpp"
#include "clustercast/rng.hpp"
#include "clustercast/quadrature.hpp"
#include "clustercast/model.hpp"
#include "clustercast/analytic.hpp"
#include "clustercast/simulate.hpp"
#include "clustercast/sweep.hpp"
