#pragma once

#include "sc3/baselines.hpp"
#include "sc3/barrier.hpp"
#include "sc3/channel_model.hpp"
#include "sc3/compute_model.hpp"
#include "sc3/control_model.hpp"
#include "sc3/error.hpp"
#include "sc3/oracle.hpp"
#include "sc3/problem.hpp"
#include "sc3/scenario_io.hpp"
#include "sc3/solver.hpp"
#include "sc3/surrogate.hpp"
#include "sc3/sweep.hpp"
