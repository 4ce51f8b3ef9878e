#pragma once

// Umbrella header: the full planning toolkit in one include.

#include "bench_io.hpp"
#include "common.hpp"
#include "ecd.hpp"
#include "geom.hpp"
#include "gcsprog.hpp"
#include "json_io.hpp"
#include "lp.hpp"
#include "mrmp.hpp"
#include "stgraph.hpp"
