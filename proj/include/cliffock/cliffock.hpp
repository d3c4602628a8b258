#pragma once

// Clifford-algebra Bargmann-Fock numerics: exact A_n arithmetic, monogenic
// and harmonic polynomial bases, weighted quadrature, finite-degree Bergman
// kernel models, a weighted minimal-norm Dirac solver, and the estimate
// experiments built on top of them.

#include "basis.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "experiments.hpp"
#include "fields.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "multivector.hpp"
#include "polyfield.hpp"
#include "quadrature.hpp"
#include "rational.hpp"
#include "runner.hpp"
#include "solver.hpp"
#include "weight.hpp"
