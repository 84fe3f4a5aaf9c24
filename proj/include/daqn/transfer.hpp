#pragma once

#include "daqn/transfer/transfer.hpp"
