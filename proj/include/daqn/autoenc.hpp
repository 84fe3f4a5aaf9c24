#pragma once

#include "daqn/autoenc/augment.hpp"
#include "daqn/autoenc/autoencoder.hpp"
#include "daqn/autoenc/train.hpp"
