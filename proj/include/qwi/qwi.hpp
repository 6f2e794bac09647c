#pragma once

#include "qwi/bound_states.hpp"
#include "qwi/closed_form.hpp"
#include "qwi/errors.hpp"
#include "qwi/impedance.hpp"
#include "qwi/potential.hpp"
#include "qwi/scattering.hpp"
#include "qwi/units.hpp"
