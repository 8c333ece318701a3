#pragma once

// Spectral laboratory for the damped fractional wave equation on the circle.

#include "fdwave/config.hpp"
#include "fdwave/damping.hpp"
#include "fdwave/fourier.hpp"
#include "fdwave/manifest.hpp"
#include "fdwave/operators.hpp"
#include "fdwave/parallel.hpp"
#include "fdwave/powerfit.hpp"
#include "fdwave/qevp.hpp"
#include "fdwave/quantize.hpp"
#include "fdwave/rates.hpp"
#include "fdwave/resolvent.hpp"
#include "fdwave/svg.hpp"
#include "fdwave/table.hpp"
#include "fdwave/timedomain.hpp"
