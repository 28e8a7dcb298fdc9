#pragma once

// Umbrella header.

#include "ga2d/atoms.hpp"
#include "ga2d/bath.hpp"
#include "ga2d/commands.hpp"
#include "ga2d/config_io.hpp"
#include "ga2d/core.hpp"
#include "ga2d/evolver.hpp"
#include "ga2d/geometry.hpp"
#include "ga2d/lattice.hpp"
#include "ga2d/oracle.hpp"
#include "ga2d/output.hpp"
#include "ga2d/parallel.hpp"
#include "ga2d/presets.hpp"
#include "ga2d/rabi_fit.hpp"
#include "ga2d/spectral.hpp"
#include "ga2d/state.hpp"
#include "ga2d/timeseries.hpp"
