#ifndef SNLOC_SNLOC_HPP
#define SNLOC_SNLOC_HPP

#include "snloc/config.hpp"
#include "snloc/csv.hpp"
#include "snloc/detection.hpp"
#include "snloc/distfit.hpp"
#include "snloc/estimation.hpp"
#include "snloc/experiment.hpp"
#include "snloc/fir.hpp"
#include "snloc/lm.hpp"
#include "snloc/plume.hpp"
#include "snloc/random.hpp"
#include "snloc/roots.hpp"
#include "snloc/sensor.hpp"
#include "snloc/sigproc.hpp"

#endif
