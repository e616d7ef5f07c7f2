#pragma once

// Umbrella header.

#include "qmarg/bench.hpp"
#include "qmarg/box.hpp"
#include "qmarg/discrepancy.hpp"
#include "qmarg/fanova.hpp"
#include "qmarg/io.hpp"
#include "qmarg/korobov_table.hpp"
#include "qmarg/lattice_cbc.hpp"
#include "qmarg/marginal_fit.hpp"
#include "qmarg/metrics.hpp"
#include "qmarg/point_set.hpp"
#include "qmarg/quadrature.hpp"
#include "qmarg/targets.hpp"
