#pragma once

#include "config.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "events.hpp"
#include "holon.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "operators.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "scenarios.hpp"
#include "stats.hpp"
#include "text.hpp"
