#pragma once

// Pseudo-spectral toolkit for critical advection / fractional-diffusion
// problems on the periodic torus: Fourier-multiplier nonlocal operators, an
// exponential-IMEX stepper for the linear equation, Picard iteration for
// quasi-linear systems (critical SQG included), and the gradient-system
// pipeline for fully nonlinear equations driven by -(-Delta)^{1/2}.

#include "fpde/calculus.hpp"
#include "fpde/cauchy_mc.hpp"
#include "fpde/config.hpp"
#include "fpde/errors.hpp"
#include "fpde/field.hpp"
#include "fpde/grid.hpp"
#include "fpde/linear.hpp"
#include "fpde/multiplier.hpp"
#include "fpde/nonlinear.hpp"
#include "fpde/norms.hpp"
#include "fpde/quasilinear.hpp"
#include "fpde/random.hpp"
#include "fpde/semigroup.hpp"
#include "fpde/snapshot_io.hpp"
#include "fpde/trajectory.hpp"

namespace fpde {
inline constexpr const char* version = "1.0.0";
}
