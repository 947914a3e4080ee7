#pragma once

#include "sadim/error.hpp"
#include "sadim/linalg.hpp"
#include "sadim/polygon.hpp"
#include "sadim/ifs.hpp"
#include "sadim/system_io.hpp"
#include "sadim/domination.hpp"
#include "sadim/pressure.hpp"
#include "sadim/kaenmaki.hpp"
#include "sadim/slices.hpp"
#include "sadim/presets.hpp"
#include "sadim/diagnostics.hpp"
#include "sadim/render.hpp"
