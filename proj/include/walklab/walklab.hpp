#pragma once

#include "walklab/abstract_search.hpp"
#include "walklab/dense_oracle.hpp"
#include "walklab/errors.hpp"
#include "walklab/experiment.hpp"
#include "walklab/graph.hpp"
#include "walklab/io.hpp"
#include "walklab/spectral.hpp"
#include "walklab/state.hpp"
#include "walklab/trace.hpp"
