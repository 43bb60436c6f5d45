/**
 * @file dynmsa.hpp
 * @brief Umbrella header for the dynmsa library.
 */

#pragma once

#include "dynmsa/community.hpp"
#include "dynmsa/core.hpp"
#include "dynmsa/ingest.hpp"
#include "dynmsa/metrics.hpp"
#include "dynmsa/numerics.hpp"
#include "dynmsa/partition.hpp"
#include "dynmsa/pipeline.hpp"
#include "dynmsa/portfolio.hpp"
#include "dynmsa/rmt.hpp"
#include "dynmsa/spectral.hpp"
#include "dynmsa/synth.hpp"
