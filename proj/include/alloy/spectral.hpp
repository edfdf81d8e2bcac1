#pragma once

#include "alloy/spectral/eigen_system.hpp"
#include "alloy/spectral/evolution.hpp"
#include "alloy/spectral/green.hpp"
#include "alloy/spectral/schur.hpp"
