#pragma once

#include "noisevar/analysis.hpp"
#include "noisevar/baselines.hpp"
#include "noisevar/errors.hpp"
#include "noisevar/estimator.hpp"
#include "noisevar/ring_window.hpp"
#include "noisevar/robust_stats.hpp"
#include "noisevar/signal_gen.hpp"
#include "noisevar/steady_state.hpp"
