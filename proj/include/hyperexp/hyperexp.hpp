#pragma once

#include "hyperexp/errors.hpp"
#include "hyperexp/scalar.hpp"
#include "hyperexp/poly.hpp"
#include "hyperexp/ratfunc.hpp"
#include "hyperexp/linalg.hpp"
#include "hyperexp/roots.hpp"
#include "hyperexp/diffop.hpp"
#include "hyperexp/number_field.hpp"
#include "hyperexp/singular.hpp"
#include "hyperexp/local.hpp"
#include "hyperexp/parser.hpp"
#include "hyperexp/ball.hpp"
#include "hyperexp/numeric.hpp"
#include "hyperexp/combine.hpp"
#include "hyperexp/ratsol.hpp"
#include "hyperexp/solver.hpp"
