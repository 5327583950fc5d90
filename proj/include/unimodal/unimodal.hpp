#pragma once

#include "backward.hpp"
#include "chainoracle.hpp"
#include "error.hpp"
#include "interval.hpp"
#include "maps.hpp"
#include "numeric.hpp"
#include "orbits.hpp"
#include "render.hpp"
#include "serialize.hpp"
#include "structure.hpp"
