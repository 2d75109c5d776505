#pragma once

// Umbrella header: series solutions of first-order systems with exponential
// coefficients, flat frames for constant and quantum-deformed products, the
// explicit projective-space solution, its hypergeometric cross-check, and a
// Runge-Kutta oracle.

#include "block_matrix.hpp"
#include "complex_matrix.hpp"
#include "compositions.hpp"
#include "egt.hpp"
#include "frobenius_chain.hpp"
#include "givental.hpp"
#include "io_json.hpp"
#include "matrix_exp.hpp"
#include "ode_series.hpp"
#include "oracle.hpp"
#include "product_algebra.hpp"
#include "projective_space.hpp"
