#pragma once

// Everything at once. Individual headers are self-contained if compile time matters.

#include "singtrack/core/contour.hpp"
#include "singtrack/core/cubic.hpp"
#include "singtrack/core/newton.hpp"
#include "singtrack/core/ode.hpp"
#include "singtrack/g0/g0.hpp"
#include "singtrack/g0/locate.hpp"
#include "singtrack/g0/stokes_fit.hpp"
#include "singtrack/hierarchy/closure.hpp"
#include "singtrack/hierarchy/hierarchy.hpp"
#include "singtrack/inner/inner_map.hpp"
#include "singtrack/io/export.hpp"
#include "singtrack/series/farfield.hpp"
#include "singtrack/series/outer.hpp"
#include "singtrack/stokes/stokes.hpp"
#include "singtrack/thinfilm/thinfilm.hpp"
#include "singtrack/verify/checks.hpp"
#include "singtrack/verify/verify.hpp"
