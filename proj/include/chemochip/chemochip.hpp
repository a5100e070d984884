#pragma once

#include "chemochip/config.hpp"
#include "chemochip/convergence.hpp"
#include "chemochip/diagnostics.hpp"
#include "chemochip/geometry.hpp"
#include "chemochip/model.hpp"
#include "chemochip/output.hpp"
#include "chemochip/scheme1d_hyperbolic.hpp"
#include "chemochip/scheme1d_parabolic.hpp"
#include "chemochip/scheme2d.hpp"
#include "chemochip/solver.hpp"
#include "chemochip/transmission.hpp"
