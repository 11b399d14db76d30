#pragma once

#include "wavecrn/analysis.h"
#include "wavecrn/errors.h"
#include "wavecrn/integrator.h"
#include "wavecrn/kinetics.h"
#include "wavecrn/lattice.h"
#include "wavecrn/network.h"
#include "wavecrn/serialization.h"
