#pragma once

#include "hosc/errors.hpp"
#include "hosc/dyadic.hpp"
#include "hosc/lie_algebra.hpp"
#include "hosc/vector_ops.hpp"
#include "hosc/group.hpp"
#include "hosc/symplectic.hpp"
#include "hosc/representation.hpp"
#include "hosc/sparse.hpp"
#include "hosc/grid.hpp"
#include "hosc/discretization.hpp"
#include "hosc/cg.hpp"
#include "hosc/eigensolver.hpp"
#include "hosc/spectral_analysis.hpp"
#include "hosc/checks.hpp"
#include "hosc/config.hpp"
#include "hosc/pipeline.hpp"
