#pragma once

// umbrella header

#include "disktomo/circle_map.hpp"
#include "disktomo/conformal.hpp"
#include "disktomo/dtn.hpp"
#include "disktomo/errors.hpp"
#include "disktomo/fft.hpp"
#include "disktomo/fourier_series.hpp"
#include "disktomo/geometry.hpp"
#include "disktomo/identify.hpp"
#include "disktomo/io.hpp"
#include "disktomo/moebius.hpp"
#include "disktomo/oracle.hpp"
#include "disktomo/precompose.hpp"
#include "disktomo/stats.hpp"
