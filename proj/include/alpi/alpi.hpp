#pragma once

// Umbrella header for the adaptive-lookahead planning library.

#include "alpi/aggregation.hpp"
#include "alpi/analysis.hpp"
#include "alpi/bellman.hpp"
#include "alpi/chain.hpp"
#include "alpi/experiment.hpp"
#include "alpi/lookahead.hpp"
#include "alpi/maze.hpp"
#include "alpi/mdp.hpp"
#include "alpi/mdp_json.hpp"
#include "alpi/planners.hpp"
#include "alpi/query_ledger.hpp"
#include "alpi/random_mdp.hpp"
#include "alpi/rng.hpp"
#include "alpi/svg.hpp"
