#pragma once

// Umbrella header.

#include "nilcircle/checked_int.hpp"
#include "nilcircle/cutoffs.hpp"
#include "nilcircle/decomposition.hpp"
#include "nilcircle/expsums.hpp"
#include "nilcircle/frequency.hpp"
#include "nilcircle/group.hpp"
#include "nilcircle/nilsystem.hpp"
#include "nilcircle/parallel.hpp"
#include "nilcircle/profiles.hpp"
#include "nilcircle/quadrature.hpp"
#include "nilcircle/quasigeom.hpp"
#include "nilcircle/rationals.hpp"
#include "nilcircle/serialize.hpp"
#include "nilcircle/sparse.hpp"
#include "nilcircle/stages.hpp"
#include "nilcircle/variation.hpp"
#include "nilcircle/version.hpp"
#include "nilcircle/weightkernel.hpp"
