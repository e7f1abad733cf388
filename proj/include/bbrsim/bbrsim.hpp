#pragma once

#include "bbrsim/sim/rng.hpp"
#include "bbrsim/sim/simulator.hpp"
#include "bbrsim/sim/time.hpp"
#include "bbrsim/sim/units.hpp"

#include "bbrsim/net/channel.hpp"
#include "bbrsim/net/packet.hpp"
#include "bbrsim/net/topology.hpp"

#include "bbrsim/transport/loss_detector.hpp"
#include "bbrsim/transport/pacer.hpp"
#include "bbrsim/transport/rate_sampler.hpp"
#include "bbrsim/transport/receiver.hpp"
#include "bbrsim/transport/rtt_stats.hpp"
#include "bbrsim/transport/sender.hpp"
#include "bbrsim/transport/trace.hpp"

#include "bbrsim/cc/bandwidth_filter.hpp"
#include "bbrsim/cc/bbr.hpp"
#include "bbrsim/cc/bbr2.hpp"
#include "bbrsim/cc/bbr_common.hpp"
#include "bbrsim/cc/congestion_controller.hpp"
#include "bbrsim/cc/cubic.hpp"
#include "bbrsim/cc/factory.hpp"
#include "bbrsim/cc/min_rtt_filter.hpp"
#include "bbrsim/cc/reno.hpp"
#include "bbrsim/cc/windowed_filter.hpp"

#include "bbrsim/metrics/csv.hpp"
#include "bbrsim/metrics/formulas.hpp"
#include "bbrsim/metrics/recorder.hpp"

#include "bbrsim/harness/cases.hpp"
#include "bbrsim/harness/config.hpp"
#include "bbrsim/harness/report.hpp"
#include "bbrsim/harness/runner.hpp"
#include "bbrsim/harness/sweep.hpp"
