#pragma once

#include "mesospec/eigensolve.hpp"
#include "mesospec/ensembles.hpp"
#include "mesospec/errors.hpp"
#include "mesospec/laws.hpp"
#include "mesospec/meso.hpp"
#include "mesospec/quadrature.hpp"
#include "mesospec/rng.hpp"
