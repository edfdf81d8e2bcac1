#pragma once

#include "alloy/cli/commands.hpp"
#include "alloy/cli/config.hpp"
#include "alloy/cli/csv.hpp"
