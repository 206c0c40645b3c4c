// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs). Umbrella header.

#pragma once

#include "milac/channel_model.hpp"
#include "milac/ls_estimation.hpp"
#include "milac/metrics.hpp"
#include "milac/milac_network.hpp"
#include "milac/mmse_estimation.hpp"
#include "milac/rng.hpp"
#include "milac/types.hpp"
