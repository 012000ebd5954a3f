#pragma once

// Umbrella header for the vardet library.

#include "vardet/covariance.hpp"
#include "vardet/criteria.hpp"
#include "vardet/kernel.hpp"
#include "vardet/linalg.hpp"
#include "vardet/multipartite.hpp"
#include "vardet/optimizer.hpp"
#include "vardet/random.hpp"
#include "vardet/state.hpp"
#include "vardet/statefile.hpp"
#include "vardet/tolerances.hpp"
#include "vardet/upb.hpp"
