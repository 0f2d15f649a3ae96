#pragma once

#include "memesim/metrics/diversity.hpp"
#include "memesim/metrics/kendall.hpp"
#include "memesim/metrics/popularity.hpp"
#include "memesim/metrics/powerlaw.hpp"
