#pragma once

#include "genconc/errors.hpp"
#include "genconc/linalg.hpp"
#include "genconc/states.hpp"
#include "genconc/concurrence.hpp"
#include "genconc/dcomputable.hpp"
#include "genconc/pmatrix.hpp"
#include "genconc/mixed.hpp"
