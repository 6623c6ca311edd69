#pragma once

#include "l2hecke/approx.hpp"
#include "l2hecke/coxeter.hpp"
#include "l2hecke/error.hpp"
#include "l2hecke/exactmath.hpp"
#include "l2hecke/farber.hpp"
#include "l2hecke/hecke.hpp"
#include "l2hecke/io.hpp"
#include "l2hecke/quotient.hpp"
