#pragma once

#include "streamopt/averaging.hpp"
#include "streamopt/config.hpp"
#include "streamopt/curvature.hpp"
#include "streamopt/datagen.hpp"
#include "streamopt/errors.hpp"
#include "streamopt/harness.hpp"
#include "streamopt/linalg.hpp"
#include "streamopt/optimizers.hpp"
#include "streamopt/problems.hpp"
#include "streamopt/rng.hpp"
#include "streamopt/schedules.hpp"
#include "streamopt/version.hpp"
