#pragma once

#include "alloy/model/disorder.hpp"
#include "alloy/model/hamiltonian.hpp"
#include "alloy/model/lattice.hpp"
#include "alloy/model/potential.hpp"
