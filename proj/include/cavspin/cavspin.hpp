#pragma once

#include "analysis.hpp"
#include "cavity_graph.hpp"
#include "couplings.hpp"
#include "dynamics.hpp"
#include "effective_model.hpp"
#include "full_model.hpp"
#include "hilbert_space.hpp"
#include "krylov.hpp"
#include "layout.hpp"
#include "physical_params.hpp"
#include "quantum_state.hpp"
#include "regime.hpp"
#include "sparse_operator.hpp"
#include "spin_operators.hpp"
#include "time_dependent_operator.hpp"
#include "types.hpp"
