#pragma once

#include "bscap/ambient.hpp"
#include "bscap/capacity.hpp"
#include "bscap/circuit.hpp"
#include "bscap/constellation.hpp"
#include "bscap/core_model.hpp"
#include "bscap/error.hpp"
#include "bscap/impedance_stats.hpp"
#include "bscap/input_laws.hpp"
#include "bscap/io.hpp"
#include "bscap/mi_engine.hpp"
#include "bscap/optimize.hpp"
#include "bscap/quadrature.hpp"
#include "bscap/region.hpp"
#include "bscap/special_functions.hpp"
