#pragma once

#include "energynet/errors.hpp"
#include "energynet/extensions.hpp"
#include "energynet/green.hpp"
#include "energynet/harmonics.hpp"
#include "energynet/kernels.hpp"
#include "energynet/network.hpp"
#include "energynet/network_io.hpp"
#include "energynet/operators.hpp"
#include "energynet/prng.hpp"
#include "energynet/sweeps.hpp"
#include "energynet/truncation.hpp"
#include "energynet/vertex_id.hpp"
