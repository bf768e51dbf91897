#pragma once

#include "ewfkit/complex_matrix.hpp"
#include "ewfkit/constellation.hpp"
#include "ewfkit/decomp.hpp"
#include "ewfkit/errors.hpp"
#include "ewfkit/ewf.hpp"
#include "ewfkit/io.hpp"
#include "ewfkit/mimo.hpp"
#include "ewfkit/random_matrices.hpp"
#include "ewfkit/rng.hpp"
#include "ewfkit/stats.hpp"
#include "ewfkit/tolerances.hpp"
#include "ewfkit/whitening.hpp"
