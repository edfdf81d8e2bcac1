#pragma once

#include "alloy/ensemble/run.hpp"
#include "alloy/ensemble/seed.hpp"
#include "alloy/ensemble/statistic.hpp"
