#ifndef ROTORPATH_ROTORPATH_HPP
#define ROTORPATH_ROTORPATH_HPP

#include "rotorpath/commands.hpp"
#include "rotorpath/config.hpp"
#include "rotorpath/constants.hpp"
#include "rotorpath/coupling.hpp"
#include "rotorpath/error.hpp"
#include "rotorpath/field_model.hpp"
#include "rotorpath/matrix.hpp"
#include "rotorpath/oracle.hpp"
#include "rotorpath/quadrature.hpp"
#include "rotorpath/quantum_core.hpp"
#include "rotorpath/rotor_model.hpp"
#include "rotorpath/scan_engine.hpp"

#endif
