#pragma once
// Umbrella header.

#include "flpricing/core.hpp"
#include "flpricing/experiment.hpp"
#include "flpricing/heterogeneous.hpp"
#include "flpricing/homogeneous.hpp"
#include "flpricing/oracle.hpp"
#include "flpricing/rng.hpp"
#include "flpricing/robustness.hpp"
#include "flpricing/simulator.hpp"
