#pragma once

// Everything except the JSON-dependent headers (io, experiment, verify).

#include "irsplace/channel.hpp"
#include "irsplace/lp.hpp"
#include "irsplace/mcsim.hpp"
#include "irsplace/problem.hpp"
#include "irsplace/random.hpp"
#include "irsplace/randomized.hpp"
#include "irsplace/solvers.hpp"
