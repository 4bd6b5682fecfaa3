#pragma once

#include "hjlab/errors.hpp"
#include "hjlab/grid.hpp"
#include "hjlab/hamiltonian.hpp"
#include "hjlab/diffusion.hpp"
#include "hjlab/catalog.hpp"
#include "hjlab/hj_solver.hpp"
#include "hjlab/fp_adjoint.hpp"
#include "hjlab/estimates.hpp"
#include "hjlab/rate_lab.hpp"
#include "hjlab/config.hpp"
#include "hjlab/report.hpp"
#include "hjlab/driver.hpp"
