#pragma once

#include "horizonbench/errors.hpp"
#include "horizonbench/series.hpp"
#include "horizonbench/market_data.hpp"
#include "horizonbench/fetch.hpp"
#include "horizonbench/preprocess.hpp"
#include "horizonbench/stationarity.hpp"
#include "horizonbench/nelder_mead.hpp"
#include "horizonbench/arma.hpp"
#include "horizonbench/metrics.hpp"
#include "horizonbench/recurrent_cells.hpp"
#include "horizonbench/recurrent.hpp"
#include "horizonbench/io.hpp"
#include "horizonbench/config.hpp"
#include "horizonbench/bench.hpp"
