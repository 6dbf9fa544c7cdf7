#ifndef NEURAL_BRANE_SYNTHETIC_HPP
#define NEURAL_BRANE_SYNTHETIC_HPP

#include "neural_brane/graph.hpp"

#include <cstdint>

namespace neural_brane {

/// Stochastic block model with community-correlated binary attributes.
/// Node u belongs to community floor(u * communities / nodes); attribute a
/// is "owned" by community a % communities.
struct PlantedPartitionOptions {
    std::size_t nodes = 60;
    std::size_t communities = 2;
    double p_intra = 0.3;
    double p_inter = 0.02;
    std::size_t attributes = 20;
    double attr_owned = 0.8;  ///< P(attribute | node in owning community)
    double attr_other = 0.05; ///< P(attribute | node elsewhere)
    std::uint64_t seed = 1;
};

/// Labels are the community ids. Node and attribute counts are exactly as
/// requested even when the last ids end up unused.
AttributedGraph make_planted_partition(const PlantedPartitionOptions& opts);

} // namespace neural_brane

#endif // NEURAL_BRANE_SYNTHETIC_HPP
