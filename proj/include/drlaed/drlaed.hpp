#pragma once

// Umbrella header.

#include "drlaed/bounds.hpp"
#include "drlaed/error.hpp"
#include "drlaed/eval.hpp"
#include "drlaed/formulations.hpp"
#include "drlaed/grid.hpp"
#include "drlaed/io.hpp"
#include "drlaed/lp.hpp"
#include "drlaed/parallel.hpp"
#include "drlaed/problem.hpp"
#include "drlaed/risk.hpp"
#include "drlaed/synthetic.hpp"
