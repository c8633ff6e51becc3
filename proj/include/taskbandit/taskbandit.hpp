#pragma once

#include "taskbandit/environment.hpp"
#include "taskbandit/harness.hpp"
#include "taskbandit/metrics.hpp"
#include "taskbandit/policy.hpp"
#include "taskbandit/rng.hpp"
#include "taskbandit/trace.hpp"
