#ifndef NUEDGE_EDGEWORTH_HPP
#define NUEDGE_EDGEWORTH_HPP

#include "nuedge/edgeworth/expansion.hpp"
#include "nuedge/edgeworth/polynomials.hpp"
#include "nuedge/edgeworth/tuples.hpp"

#endif  // NUEDGE_EDGEWORTH_HPP
