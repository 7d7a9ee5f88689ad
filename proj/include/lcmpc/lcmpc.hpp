#pragma once

// Umbrella header: the whole library in one include.

#include "analysis.hpp"
#include "app.hpp"
#include "controller.hpp"
#include "csv_io.hpp"
#include "fourier_param.hpp"
#include "grid_model.hpp"
#include "kernel_cost.hpp"
#include "linear_plant.hpp"
#include "normal_forms.hpp"
#include "optimizer.hpp"
#include "scenario.hpp"
#include "simulator.hpp"
#include "validate.hpp"
