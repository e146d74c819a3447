#ifndef NUEDGE_MODELS_HPP
#define NUEDGE_MODELS_HPP

#include "nuedge/models/builtin.hpp"
#include "nuedge/models/chain.hpp"
#include "nuedge/models/chain_io.hpp"
#include "nuedge/models/diagnostics.hpp"
#include "nuedge/models/exact.hpp"
#include "nuedge/models/lattice.hpp"
#include "nuedge/models/montecarlo.hpp"
#include "nuedge/models/piecewise.hpp"

#endif  // NUEDGE_MODELS_HPP
