#ifndef CFGQM_CFGQM_HPP
#define CFGQM_CFGQM_HPP

#include "cfgqm/errors.hpp"
#include "cfgqm/grid.hpp"
#include "cfgqm/force.hpp"
#include "cfgqm/wavefunction.hpp"
#include "cfgqm/spectral.hpp"
#include "cfgqm/operators.hpp"
#include "cfgqm/classical.hpp"
#include "cfgqm/observables.hpp"
#include "cfgqm/propagators.hpp"
#include "cfgqm/spectra.hpp"
#include "cfgqm/config.hpp"
#include "cfgqm/io.hpp"
#include "cfgqm/scenarios.hpp"

#endif  // CFGQM_CFGQM_HPP
