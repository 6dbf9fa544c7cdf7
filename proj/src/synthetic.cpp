#include "neural_brane/synthetic.hpp"

#include "neural_brane/errors.hpp"

#include <random>

namespace neural_brane {

AttributedGraph make_planted_partition(const PlantedPartitionOptions& opts) {
    if (opts.nodes == 0 || opts.communities == 0 || opts.communities > opts.nodes)
        throw InputError("planted partition needs 1 <= communities <= nodes");
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    auto community = [&](std::size_t u) { return u * opts.communities / opts.nodes; };

    GraphBuilder b;
    for (std::size_t u = 0; u < opts.nodes; ++u) {
        for (std::size_t v = u + 1; v < opts.nodes; ++v) {
            const double p = community(u) == community(v) ? opts.p_intra : opts.p_inter;
            if (coin(rng) < p) b.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
        }
    }
    for (std::size_t u = 0; u < opts.nodes; ++u) {
        std::vector<AttrId> attrs;
        for (std::size_t a = 0; a < opts.attributes; ++a) {
            const double p = a % opts.communities == community(u) ? opts.attr_owned : opts.attr_other;
            if (coin(rng) < p) attrs.push_back(static_cast<AttrId>(a));
        }
        b.set_attributes(static_cast<NodeId>(u), std::move(attrs));
        b.set_label(static_cast<NodeId>(u), static_cast<ClassId>(community(u)));
    }
    return b.build(opts.nodes, opts.attributes);
}

} // namespace neural_brane
