#pragma once

#include "cascade_guard/cascade.hpp"
#include "cascade_guard/dataset.hpp"
#include "cascade_guard/errors.hpp"
#include "cascade_guard/estimation.hpp"
#include "cascade_guard/harness.hpp"
#include "cascade_guard/rng.hpp"
#include "cascade_guard/sampling.hpp"
