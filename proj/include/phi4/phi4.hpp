#pragma once

// Umbrella header.

#include "phi4/analysis.hpp"
#include "phi4/elliptic.hpp"
#include "phi4/errors.hpp"
#include "phi4/evolution.hpp"
#include "phi4/fourier.hpp"
#include "phi4/grid.hpp"
#include "phi4/report.hpp"
#include "phi4/spectral.hpp"
#include "phi4/waves.hpp"
