#pragma once

#include "bgrmt/closed_form_01.hpp"
#include "bgrmt/density.hpp"
#include "bgrmt/dirac.hpp"
#include "bgrmt/errors.hpp"
#include "bgrmt/free_energy.hpp"
#include "bgrmt/model.hpp"
#include "bgrmt/montecarlo.hpp"
#include "bgrmt/quadrature.hpp"
#include "bgrmt/riemann_hilbert.hpp"
#include "bgrmt/self_consistent.hpp"
