#pragma once

#include "uavloc/augment.hpp"
#include "uavloc/dataset.hpp"
#include "uavloc/embed.hpp"
#include "uavloc/error.hpp"
#include "uavloc/geo.hpp"
#include "uavloc/metrics.hpp"
#include "uavloc/raster.hpp"
#include "uavloc/replay.hpp"
#include "uavloc/retrieval.hpp"
#include "uavloc/text.hpp"
#include "uavloc/tilecut.hpp"
#include "uavloc/trajectory.hpp"

namespace uavloc {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace uavloc
