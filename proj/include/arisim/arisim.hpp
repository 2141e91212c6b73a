#pragma once

// Umbrella header: the full simulator, trainer, and experiment harness.

#include "arisim/baselines.hpp"
#include "arisim/channel.hpp"
#include "arisim/checkpoint.hpp"
#include "arisim/common.hpp"
#include "arisim/config.hpp"
#include "arisim/env.hpp"
#include "arisim/export.hpp"
#include "arisim/hppo.hpp"
#include "arisim/mlp.hpp"
#include "arisim/network.hpp"
#include "arisim/oracle.hpp"
#include "arisim/ris.hpp"
#include "arisim/sweep.hpp"
#include "arisim/version.hpp"
