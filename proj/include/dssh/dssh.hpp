#pragma once

// Umbrella header for the dissipative SSH library.

#include "cli_support.hpp"
#include "effective.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "sweeps.hpp"
#include "third_quant.hpp"
#include "validation.hpp"
#include "zak.hpp"
