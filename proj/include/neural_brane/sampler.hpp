#ifndef NEURAL_BRANE_SAMPLER_HPP
#define NEURAL_BRANE_SAMPLER_HPP

#include "neural_brane/alias_table.hpp"
#include "neural_brane/graph.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace neural_brane {

using Rng = std::mt19937_64;

/// Ranking triple: i is a neighbor of u, j is not, so u should score i
/// above j.
struct Triplet {
    NodeId u = 0;
    NodeId i = 0;
    NodeId j = 0;

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Alias table over N(u) weighted by w_ui. Throws InputError if u is isolated.
AliasTable build_positive_sampler(const AttributedGraph& g, NodeId u);

/// Alias table over all nodes weighted by degree. Throws InputError if the
/// graph has no edges.
AliasTable build_negative_sampler(const AttributedGraph& g);

/// Streams valid triplets from a graph. Anchors are uniform over nodes that
/// have at least one neighbor and at least one non-neighbor; the positive is
/// drawn by edge weight and the negative by degree, rejecting N(u), u and i.
class TripletSampler {
public:
    static constexpr int kMaxRejections = 100;

    /// Throws InputError if the graph has fewer than 3 nodes, no edges, or
    /// no node admits a valid negative.
    explicit TripletSampler(const AttributedGraph& g);

    Triplet sample(Rng& rng) const;
    std::vector<Triplet> sample_batch(std::size_t batch_size, Rng& rng) const;
    void sample_batch(std::size_t batch_size, Rng& rng, std::vector<Triplet>& out) const;

    std::span<const NodeId> anchors() const noexcept { return anchors_; }
    const AliasTable& negative_table() const noexcept { return negative_; }
    const AliasTable& positive_table(NodeId u) const { return positive_.at(u); }

    /// Counts how often the rejection cap was hit and the uniform scan ran.
    std::uint64_t fallback_count() const noexcept { return fallbacks_; }

private:
    NodeId sample_negative(NodeId u, NodeId i, Rng& rng) const;

    const AttributedGraph* graph_;
    std::vector<NodeId> anchors_;
    std::vector<AliasTable> positive_;
    AliasTable negative_;
    mutable std::uint64_t fallbacks_ = 0;
};

} // namespace neural_brane

#endif // NEURAL_BRANE_SAMPLER_HPP
