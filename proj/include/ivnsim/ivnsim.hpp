// Umbrella header.

#pragma once

#include "ivnsim/channel.hpp"
#include "ivnsim/harness.hpp"
#include "ivnsim/oracle.hpp"
#include "ivnsim/rng.hpp"
#include "ivnsim/scheduling.hpp"
#include "ivnsim/solver.hpp"
#include "ivnsim/topology.hpp"
#include "ivnsim/types.hpp"
#include "ivnsim/workload.hpp"
