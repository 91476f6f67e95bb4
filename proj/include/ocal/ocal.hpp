// ocal.hpp - umbrella header for the one-class active learning library.

#pragma once

#include "ocal/data.hpp"
#include "ocal/density.hpp"
#include "ocal/experiment.hpp"
#include "ocal/io.hpp"
#include "ocal/loop.hpp"
#include "ocal/metrics.hpp"
#include "ocal/rng.hpp"
#include "ocal/strategies.hpp"
#include "ocal/svdd.hpp"
