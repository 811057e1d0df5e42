#pragma once

// Umbrella header for the forge library.

#include "forge/error.hpp"
#include "forge/rational.hpp"
#include "forge/scalar.hpp"
#include "forge/semigroup.hpp"
#include "forge/weights.hpp"
#include "forge/algebra.hpp"
#include "forge/characters.hpp"
#include "forge/lp.hpp"
#include "forge/interval.hpp"
#include "forge/cones.hpp"
#include "forge/extension.hpp"
#include "forge/density.hpp"
#include "forge/arithmetic.hpp"
