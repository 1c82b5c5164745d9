#pragma once

#include "twso/degrade.hpp"
#include "twso/diffops.hpp"
#include "twso/grid.hpp"
#include "twso/metrics.hpp"
#include "twso/solver.hpp"
#include "twso/spectral.hpp"
#include "twso/tensor.hpp"
