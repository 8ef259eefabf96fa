#pragma once

#include "classifier.hpp"
#include "criteria.hpp"
#include "cycles.hpp"
#include "errors.hpp"
#include "poly.hpp"
#include "ratio_map.hpp"
#include "simulator.hpp"
