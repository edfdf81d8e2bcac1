#pragma once

#include "alloy/diagnostics/dynamics.hpp"
#include "alloy/diagnostics/fit.hpp"
#include "alloy/diagnostics/fractional.hpp"
#include "alloy/diagnostics/model_spec.hpp"
#include "alloy/diagnostics/regularity.hpp"
#include "alloy/diagnostics/spectrum.hpp"
#include "alloy/diagnostics/suitability.hpp"
#include "alloy/diagnostics/wegner.hpp"
