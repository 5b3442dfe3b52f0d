#pragma once

// Umbrella header for the nonlocal-calculus library.

#include "nlc/bumps.hpp"
#include "nlc/cutoff.hpp"
#include "nlc/errors.hpp"
#include "nlc/field_io.hpp"
#include "nlc/fourier_checks.hpp"
#include "nlc/ftc.hpp"
#include "nlc/grid.hpp"
#include "nlc/inequalities.hpp"
#include "nlc/kernels.hpp"
#include "nlc/operators.hpp"
#include "nlc/params.hpp"
#include "nlc/quadrature.hpp"
#include "nlc/spectral.hpp"
#include "nlc/util.hpp"
#include "nlc/variational.hpp"
