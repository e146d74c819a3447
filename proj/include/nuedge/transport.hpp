#ifndef NUEDGE_TRANSPORT_HPP
#define NUEDGE_TRANSPORT_HPP

#include "nuedge/transport/cdf.hpp"
#include "nuedge/transport/coupling.hpp"
#include "nuedge/transport/distances.hpp"

#endif  // NUEDGE_TRANSPORT_HPP
