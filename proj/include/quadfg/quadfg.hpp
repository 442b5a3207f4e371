// Umbrella header.

#pragma once

#include "quadfg/so3.hpp"

#include "quadfg/quad/allocation.hpp"
#include "quadfg/quad/dynamics.hpp"
#include "quadfg/quad/params.hpp"
#include "quadfg/quad/simulator.hpp"
#include "quadfg/quad/state.hpp"

#include "quadfg/fgo/factor.hpp"
#include "quadfg/fgo/graph.hpp"
#include "quadfg/fgo/key.hpp"
#include "quadfg/fgo/noise.hpp"
#include "quadfg/fgo/values.hpp"

#include "quadfg/factors/control.hpp"
#include "quadfg/factors/measurement.hpp"

#include "quadfg/control/config.hpp"
#include "quadfg/control/controller.hpp"

#include "quadfg/traj/reference.hpp"

#include "quadfg/harness/config_file.hpp"
#include "quadfg/harness/metrics.hpp"
#include "quadfg/harness/run_log.hpp"
#include "quadfg/harness/runner.hpp"
#include "quadfg/harness/scenario.hpp"
