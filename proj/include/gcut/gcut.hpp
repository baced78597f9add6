#pragma once

#include "gcut/asymptotics.hpp"
#include "gcut/cuts.hpp"
#include "gcut/discretization.hpp"
#include "gcut/error.hpp"
#include "gcut/graph.hpp"
#include "gcut/maxflow.hpp"
#include "gcut/partition.hpp"
#include "gcut/resampling.hpp"
#include "gcut/rng.hpp"
#include "gcut/stats.hpp"
#include "gcut/xist.hpp"
