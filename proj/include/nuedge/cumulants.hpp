#ifndef NUEDGE_CUMULANTS_HPP
#define NUEDGE_CUMULANTS_HPP

#include "nuedge/cumulants/charfn.hpp"
#include "nuedge/cumulants/checks.hpp"
#include "nuedge/cumulants/lambda.hpp"
#include "nuedge/cumulants/moments.hpp"
#include "nuedge/cumulants/stationary.hpp"

#endif  // NUEDGE_CUMULANTS_HPP
