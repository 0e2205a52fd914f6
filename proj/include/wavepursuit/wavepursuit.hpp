#pragma once

#include "wavepursuit/agents.hpp"
#include "wavepursuit/analysis.hpp"
#include "wavepursuit/environment.hpp"
#include "wavepursuit/error.hpp"
#include "wavepursuit/field.hpp"
#include "wavepursuit/figures.hpp"
#include "wavepursuit/game.hpp"
#include "wavepursuit/grid.hpp"
#include "wavepursuit/guidance.hpp"
#include "wavepursuit/scenario.hpp"
#include "wavepursuit/trace_io.hpp"
#include "wavepursuit/vec2.hpp"
