#pragma once

#include "swarmcov/csv.hpp"
#include "swarmcov/density.hpp"
#include "swarmcov/error_metric.hpp"
#include "swarmcov/errors.hpp"
#include "swarmcov/extrema.hpp"
#include "swarmcov/geometry.hpp"
#include "swarmcov/grid.hpp"
#include "swarmcov/kernel.hpp"
#include "swarmcov/parallel.hpp"
#include "swarmcov/quadrature.hpp"
#include "swarmcov/rng.hpp"
#include "swarmcov/special_math.hpp"
#include "swarmcov/statistics.hpp"
#include "swarmcov/walkers.hpp"
