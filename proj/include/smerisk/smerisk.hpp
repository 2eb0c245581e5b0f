#pragma once

#include "smerisk/cart.hpp"
#include "smerisk/dataset.hpp"
#include "smerisk/error.hpp"
#include "smerisk/experiment.hpp"
#include "smerisk/forest.hpp"
#include "smerisk/logit.hpp"
#include "smerisk/metrics.hpp"
#include "smerisk/numeric.hpp"
#include "smerisk/random.hpp"
#include "smerisk/serialize.hpp"
#include "smerisk/synthgen.hpp"
