#pragma once

#include "soliton_lab/core.hpp"
#include "soliton_lab/field.hpp"
#include "soliton_lab/grid.hpp"
#include "soliton_lab/radial.hpp"
#include "soliton_lab/ground_state.hpp"
#include "soliton_lab/soliton.hpp"
#include "soliton_lab/linop.hpp"
#include "soliton_lab/spectrum.hpp"
#include "soliton_lab/projections.hpp"
#include "soliton_lab/evolve.hpp"
#include "soliton_lab/modulation.hpp"
#include "soliton_lab/manifold.hpp"
#include "soliton_lab/resolvent.hpp"
#include "soliton_lab/lorentz.hpp"
