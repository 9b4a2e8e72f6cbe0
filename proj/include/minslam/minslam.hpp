#pragma once

#include "minslam/angle.hpp"
#include "minslam/angular_cost.hpp"
#include "minslam/chordal.hpp"
#include "minslam/errors.hpp"
#include "minslam/geodesic.hpp"
#include "minslam/gls.hpp"
#include "minslam/io.hpp"
#include "minslam/objectives.hpp"
#include "minslam/optimizer.hpp"
#include "minslam/parallel.hpp"
#include "minslam/problem.hpp"
#include "minslam/reduction.hpp"
#include "minslam/sweep.hpp"
#include "minslam/verify.hpp"
#include "minslam/version.hpp"
