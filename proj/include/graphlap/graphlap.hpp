#pragma once

#include "averaging.hpp"
#include "core.hpp"
#include "estimator.hpp"
#include "experiments.hpp"
#include "geometry.hpp"
#include "kernel.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "record.hpp"
#include "stats.hpp"
#include "test_function.hpp"
