#pragma once

#include "daqn/nnkit/grad_check.hpp"
#include "daqn/nnkit/layer_spec.hpp"
#include "daqn/nnkit/layers.hpp"
#include "daqn/nnkit/loss.hpp"
#include "daqn/nnkit/network.hpp"
#include "daqn/nnkit/normalization.hpp"
#include "daqn/nnkit/optimizer.hpp"
#include "daqn/nnkit/serialize.hpp"
#include "daqn/nnkit/tensor.hpp"
