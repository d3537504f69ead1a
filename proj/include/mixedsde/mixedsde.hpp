#pragma once

// Umbrella header: simulation of mixed SDEs driven by Brownian motion and
// fractional Brownian motion (H > 1/2), the fractional calculus behind the
// pathwise integral, Euler approximation with stopping times, the Bihari
// bound, and the experiment harness.

#include "mixedsde/bihari.hpp"
#include "mixedsde/coefficients.hpp"
#include "mixedsde/csv.hpp"
#include "mixedsde/euler.hpp"
#include "mixedsde/frac_calc.hpp"
#include "mixedsde/gauss_drivers.hpp"
#include "mixedsde/grid.hpp"
#include "mixedsde/harness/config.hpp"
#include "mixedsde/harness/parallel.hpp"
#include "mixedsde/harness/studies.hpp"
#include "mixedsde/harness/toml_lite.hpp"
#include "mixedsde/rng.hpp"
