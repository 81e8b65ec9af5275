#pragma once

#include "rtiform/errors.hpp"
#include "rtiform/lie.hpp"
#include "rtiform/uav.hpp"
#include "rtiform/topology.hpp"
#include "rtiform/profile.hpp"
#include "rtiform/feasibility.hpp"
#include "rtiform/controller.hpp"
#include "rtiform/scenario.hpp"
#include "rtiform/simulator.hpp"
#include "rtiform/report.hpp"
#include "rtiform/export.hpp"
