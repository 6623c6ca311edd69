#pragma once

#include "l2hecke/exactmath/matrix.hpp"
#include "l2hecke/exactmath/nullity.hpp"
#include "l2hecke/exactmath/polynomial.hpp"
#include "l2hecke/exactmath/rational.hpp"
