#pragma once

// Umbrella header.
#include "prophet/error.hpp"
#include "prophet/rng.hpp"
#include "prophet/quadrature.hpp"
#include "prophet/core_model.hpp"
#include "prophet/alpha.hpp"
#include "prophet/thresholds.hpp"
#include "prophet/simulator.hpp"
#include "prophet/bounds.hpp"
#include "prophet/ode.hpp"
#include "prophet/nelder_mead.hpp"
#include "prophet/lp.hpp"
#include "prophet/optimizer.hpp"
#include "prophet/adversarial.hpp"
#include "prophet/io.hpp"
