#pragma once

#include "atlas/checks.hpp"
#include "atlas/epw.hpp"
#include "atlas/error.hpp"
#include "atlas/exterior.hpp"
#include "atlas/field.hpp"
#include "atlas/groebner.hpp"
#include "atlas/interpolate.hpp"
#include "atlas/lagloci.hpp"
#include "atlas/mat.hpp"
#include "atlas/poly.hpp"
#include "atlas/quadloci.hpp"
#include "atlas/rng.hpp"
#include "atlas/subspace.hpp"
#include "atlas/synth.hpp"
