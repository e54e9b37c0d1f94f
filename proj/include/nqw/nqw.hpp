#pragma once

#include "nqw/errors.hpp"
#include "nqw/lattice.hpp"
#include "nqw/linear_walk.hpp"
#include "nqw/nonlinear_step.hpp"
#include "nqw/observables.hpp"
#include "nqw/solitons.hpp"
#include "nqw/spinor.hpp"
#include "nqw/version.hpp"
