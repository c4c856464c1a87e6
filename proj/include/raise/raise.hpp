#pragma once

// Umbrella header for the raise-forge library.

#include "raise/builder.hpp"
#include "raise/cli.hpp"
#include "raise/csv.hpp"
#include "raise/diag.hpp"
#include "raise/dot.hpp"
#include "raise/exchange.hpp"
#include "raise/fixture.hpp"
#include "raise/gsn.hpp"
#include "raise/hara.hpp"
#include "raise/hara_io.hpp"
#include "raise/json_guard.hpp"
#include "raise/pattern.hpp"
#include "raise/pattern_dsl.hpp"
#include "raise/report.hpp"
