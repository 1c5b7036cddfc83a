#pragma once

#include "kwgraph/errors.hpp"
#include "kwgraph/graph.hpp"
#include "kwgraph/generators.hpp"
#include "kwgraph/graph_spec.hpp"
#include "kwgraph/exhaustion.hpp"
#include "kwgraph/vertex_function.hpp"
#include "kwgraph/calculus.hpp"
#include "kwgraph/operator_matrix.hpp"
#include "kwgraph/flow.hpp"
#include "kwgraph/newton.hpp"
#include "kwgraph/spectral.hpp"
#include "kwgraph/functions.hpp"
#include "kwgraph/series.hpp"
#include "kwgraph/conditions.hpp"
#include "kwgraph/json_io.hpp"
#include "kwgraph/driver.hpp"
#include "kwgraph/reports.hpp"
