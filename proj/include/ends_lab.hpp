#pragma once

#include "ends_lab/params.hpp"
#include "ends_lab/quadrature.hpp"
#include "ends_lab/search.hpp"
#include "ends_lab/parallel.hpp"
#include "ends_lab/geometry.hpp"
#include "ends_lab/functions.hpp"
#include "ends_lab/maximal.hpp"
#include "ends_lab/lowdisc.hpp"
#include "ends_lab/heat.hpp"
#include "ends_lab/weaktype.hpp"
#include "ends_lab/oracle.hpp"
#include "ends_lab/io.hpp"
