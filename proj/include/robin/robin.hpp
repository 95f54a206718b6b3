#pragma once

#include "robin/closed_form.hpp"
#include "robin/experiments.hpp"
#include "robin/geometry.hpp"
#include "robin/grid.hpp"
#include "robin/problems.hpp"
#include "robin/quotient.hpp"
#include "robin/solver.hpp"
#include "robin/trace.hpp"
