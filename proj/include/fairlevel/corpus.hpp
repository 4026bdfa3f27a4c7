#pragma once

#include <vector>

#include "fairlevel/population.hpp"

namespace fairlevel {

// The bundled verification corpus: small populations (at most 6 aware decision
// units each) covering both regimes, all three notions, separated and neutral
// compositions, undefined-eta cells, and deterministic generated grids.
// Order is fixed; population names are unique.
const std::vector<PopulationSpec>& corpus_populations();

} // namespace fairlevel
