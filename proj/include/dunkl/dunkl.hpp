#pragma once

#include "dunkl/errors.hpp"
#include "dunkl/root_system.hpp"
#include "dunkl/sampling.hpp"
#include "dunkl/report.hpp"
#include "dunkl/rank_one.hpp"
#include "dunkl/ode.hpp"
#include "dunkl/kernel.hpp"
#include "dunkl/geometry.hpp"
#include "dunkl/verify.hpp"
#include "dunkl/asymptotics.hpp"
#include "dunkl/config.hpp"
#include "dunkl/json_io.hpp"
