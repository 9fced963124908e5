#pragma once

#include "plcbandit/channel.hpp"
#include "plcbandit/config.hpp"
#include "plcbandit/errors.hpp"
#include "plcbandit/experiment.hpp"
#include "plcbandit/noise_capacity.hpp"
#include "plcbandit/policies.hpp"
#include "plcbandit/simulator.hpp"
