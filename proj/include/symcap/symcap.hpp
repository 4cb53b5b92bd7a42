#pragma once

// Convenience include of the whole library.

#include "symcap/dynamics.hpp"
#include "symcap/errors.hpp"
#include "symcap/io.hpp"
#include "symcap/mve.hpp"
#include "symcap/numerics.hpp"
#include "symcap/phase_space.hpp"
#include "symcap/spectrum.hpp"
#include "symcap/uncertainty.hpp"
