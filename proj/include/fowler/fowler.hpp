#pragma once

#include "fowler/commands.hpp"
#include "fowler/config.hpp"
#include "fowler/diagnostics.hpp"
#include "fowler/evolution.hpp"
#include "fowler/fft.hpp"
#include "fowler/grid.hpp"
#include "fowler/io.hpp"
#include "fowler/kernel.hpp"
#include "fowler/nonlocal.hpp"
#include "fowler/profile.hpp"
#include "fowler/quadrature.hpp"
#include "fowler/symbol.hpp"
