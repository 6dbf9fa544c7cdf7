#include "neural_brane/sampler.hpp"

#include "neural_brane/errors.hpp"

#include <string>

namespace neural_brane {

AliasTable build_positive_sampler(const AttributedGraph& g, NodeId u) {
    if (g.degree(u) == 0)
        throw InputError("node " + std::to_string(u) + " has no neighbors to sample");
    return AliasTable(g.weights(u));
}

AliasTable build_negative_sampler(const AttributedGraph& g) {
    if (g.edge_count() == 0) throw InputError("negative sampling needs at least one edge");
    std::vector<double> deg(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) deg[u] = static_cast<double>(g.degree(u));
    return AliasTable(deg);
}

TripletSampler::TripletSampler(const AttributedGraph& g) : graph_(&g) {
    if (g.node_count() < 3) throw InputError("triplet sampling needs at least 3 nodes");
    negative_ = build_negative_sampler(g);
    positive_.resize(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const std::size_t deg = g.degree(u);
        if (deg == 0) continue;
        positive_[u] = build_positive_sampler(g, u);
        // u needs some j outside N(u) ∪ {u}.
        if (deg + 1 < g.node_count()) anchors_.push_back(u);
    }
    if (anchors_.empty())
        throw InputError("unsatisfiable negatives: every neighborhood covers all other nodes");
}

NodeId TripletSampler::sample_negative(NodeId u, NodeId i, Rng& rng) const {
    const auto& g = *graph_;
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        auto j = static_cast<NodeId>(negative_.sample(rng));
        if (j != u && j != i && !g.has_edge(u, j)) return j;
    }
    ++fallbacks_;
    std::vector<NodeId> valid;
    for (NodeId j = 0; j < g.node_count(); ++j)
        if (j != u && j != i && !g.has_edge(u, j)) valid.push_back(j);
    if (valid.empty())
        throw InputError("unsatisfiable negative for anchor " + std::to_string(u));
    std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
    return valid[pick(rng)];
}

Triplet TripletSampler::sample(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> anchor(0, anchors_.size() - 1);
    Triplet t;
    t.u = anchors_[anchor(rng)];
    t.i = graph_->neighbors(t.u)[positive_[t.u].sample(rng)];
    t.j = sample_negative(t.u, t.i, rng);
    return t;
}

void TripletSampler::sample_batch(std::size_t batch_size, Rng& rng, std::vector<Triplet>& out) const {
    out.clear();
    out.reserve(batch_size);
    for (std::size_t k = 0; k < batch_size; ++k) out.push_back(sample(rng));
}

std::vector<Triplet> TripletSampler::sample_batch(std::size_t batch_size, Rng& rng) const {
    std::vector<Triplet> out;
    sample_batch(batch_size, rng, out);
    return out;
}

} // namespace neural_brane
