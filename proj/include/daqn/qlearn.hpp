#pragma once

#include "daqn/qlearn/agent.hpp"
#include "daqn/qlearn/dqn_config.hpp"
#include "daqn/qlearn/policy.hpp"
#include "daqn/qlearn/replay.hpp"
#include "daqn/qlearn/tabular.hpp"
#include "daqn/qlearn/training.hpp"
