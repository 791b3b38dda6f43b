#pragma once

// Umbrella header: energy-distance two-sample testing for planar shape data.

#include "exen/datagen.hpp"
#include "exen/energy.hpp"
#include "exen/error.hpp"
#include "exen/io.hpp"
#include "exen/linalg.hpp"
#include "exen/resample.hpp"
#include "exen/rng.hpp"
#include "exen/shape.hpp"
