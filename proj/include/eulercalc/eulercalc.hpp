#pragma once

#include "eulercalc/errors.hpp"
#include "eulercalc/rational.hpp"
#include "eulercalc/euler_core.hpp"
#include "eulercalc/sweep.hpp"
#include "eulercalc/shapes2d.hpp"
#include "eulercalc/simplicial.hpp"
#include "eulercalc/radon.hpp"
