#pragma once

// Umbrella header for the latacc library: Bayesian accuracy estimation for
// binary classifiers on unlabeled data via two-classifier latent-class models.

#include "latacc/analysis.hpp"
#include "latacc/chains.hpp"
#include "latacc/config.hpp"
#include "latacc/diagnostics.hpp"
#include "latacc/errors.hpp"
#include "latacc/grid_oracle.hpp"
#include "latacc/io.hpp"
#include "latacc/model.hpp"
#include "latacc/posterior.hpp"
#include "latacc/priors.hpp"
#include "latacc/report.hpp"
#include "latacc/rng.hpp"
#include "latacc/sampler.hpp"
#include "latacc/special.hpp"
