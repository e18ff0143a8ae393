#pragma once

// Umbrella header for the whole library.

#include "batchsim/analytics.hpp"
#include "batchsim/bench.hpp"
#include "batchsim/codec.hpp"
#include "batchsim/composer.hpp"
#include "batchsim/engine.hpp"
#include "batchsim/model.hpp"
#include "batchsim/parametric_model.hpp"
#include "batchsim/poc_model.hpp"
#include "batchsim/types.hpp"
