#pragma once

#include "sprlab/error.hpp"
#include "sprlab/linalg.hpp"
#include "sprlab/simplex.hpp"
#include "sprlab/grid.hpp"
#include "sprlab/sced.hpp"
#include "sprlab/polytope.hpp"
#include "sprlab/random.hpp"
#include "sprlab/mpr.hpp"
#include "sprlab/learn.hpp"
#include "sprlab/eval.hpp"
#include "sprlab/datagen.hpp"
#include "sprlab/io.hpp"
