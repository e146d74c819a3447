#ifndef NUEDGE_HARNESS_HPP
#define NUEDGE_HARNESS_HPP

#include "nuedge/harness/laws.hpp"
#include "nuedge/harness/report.hpp"
#include "nuedge/harness/scans.hpp"
#include "nuedge/harness/scenario.hpp"

#endif  // NUEDGE_HARNESS_HPP
