#pragma once

// Titchmarsh-Weyl m-functions for half-line Schrodinger operators by the
// boundary-control route: solve the Volterra kernel equation, read the
// amplitude off its diagonal, and Laplace-transform with certified
// truncation bounds.

#include "weylbc/amplitude.hpp"
#include "weylbc/bounds.hpp"
#include "weylbc/errors.hpp"
#include "weylbc/goursat.hpp"
#include "weylbc/grid.hpp"
#include "weylbc/io.hpp"
#include "weylbc/oracle.hpp"
#include "weylbc/potential.hpp"
#include "weylbc/response.hpp"
#include "weylbc/spectral.hpp"
