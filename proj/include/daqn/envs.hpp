#pragma once

#include "daqn/envs/cartpole.hpp"
#include "daqn/envs/dataset.hpp"
#include "daqn/envs/environment.hpp"
#include "daqn/envs/glyph.hpp"
#include "daqn/envs/glyph_duel.hpp"
#include "daqn/envs/pgm.hpp"
