#pragma once

#include "eep/averaging.hpp"
#include "eep/compare.hpp"
#include "eep/dynamics.hpp"
#include "eep/error.hpp"
#include "eep/exact.hpp"
#include "eep/harmonic.hpp"
#include "eep/multiscale.hpp"
#include "eep/params.hpp"
#include "eep/solution.hpp"
