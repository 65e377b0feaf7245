#pragma once

// Convenience include of the whole library.

#include "aswl/analysis.hpp"
#include "aswl/artin_hasse.hpp"
#include "aswl/cli.hpp"
#include "aswl/cyclo.hpp"
#include "aswl/dwork.hpp"
#include "aswl/errors.hpp"
#include "aswl/field.hpp"
#include "aswl/lfun.hpp"
#include "aswl/numeric.hpp"
#include "aswl/render.hpp"
#include "aswl/series.hpp"
#include "aswl/spec_io.hpp"
#include "aswl/tower.hpp"
#include "aswl/zmod.hpp"
