#pragma once

#include "medlat/algorithm.hpp"
#include "medlat/dft.hpp"
#include "medlat/error_lab.hpp"
#include "medlat/errors.hpp"
#include "medlat/estimator.hpp"
#include "medlat/experiment.hpp"
#include "medlat/index_set.hpp"
#include "medlat/korobov.hpp"
#include "medlat/lattice.hpp"
#include "medlat/median.hpp"
#include "medlat/primes.hpp"
#include "medlat/random.hpp"
#include "medlat/serialize.hpp"
#include "medlat/special.hpp"
#include "medlat/test_function.hpp"
