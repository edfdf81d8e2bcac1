#pragma once

#include "alloy/bounds/averaging.hpp"
#include "alloy/bounds/cartan.hpp"
#include "alloy/bounds/green_identity.hpp"
#include "alloy/bounds/instances.hpp"
#include "alloy/bounds/polynomial.hpp"
#include "alloy/bounds/quadrature.hpp"
#include "alloy/bounds/report.hpp"
#include "alloy/bounds/sublevel.hpp"
