#pragma once

// Umbrella header for the scaleBF library.

#include "scalebf/bench.hpp"
#include "scalebf/bloom3d.hpp"
#include "scalebf/crc64.hpp"
#include "scalebf/fpp.hpp"
#include "scalebf/group.hpp"
#include "scalebf/hash.hpp"
#include "scalebf/image.hpp"
#include "scalebf/primes.hpp"
#include "scalebf/scale_filter.hpp"
