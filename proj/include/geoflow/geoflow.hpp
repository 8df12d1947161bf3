#pragma once

#include "scalar.hpp"
#include "errors.hpp"
#include "tensor.hpp"
#include "linalg.hpp"
#include "exterior.hpp"
#include "g2.hpp"
#include "su2.hpp"
#include "symbols.hpp"
#include "parallel.hpp"
#include "grid.hpp"
#include "curvature.hpp"
#include "map_laplacian.hpp"
#include "hodge_flow.hpp"
#include "einstein.hpp"
#include "warped.hpp"
#include "expr.hpp"
#include "io.hpp"
#include "acceptance.hpp"
