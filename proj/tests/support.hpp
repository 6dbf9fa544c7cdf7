// Shared fixtures for the unit and acceptance tests.
#ifndef NEURAL_BRANE_TESTS_SUPPORT_HPP
#define NEURAL_BRANE_TESTS_SUPPORT_HPP

#include "neural_brane/graph.hpp"
#include "neural_brane/model.hpp"
#include "neural_brane/sampler.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace nb_test {

using namespace neural_brane;

inline std::filesystem::path data_dir() { return NEURAL_BRANE_TEST_DATA_DIR; }

inline GraphFiles toy_files() {
    const auto dir = data_dir() / "toy";
    return {dir / "toy.edges", dir / "toy.attrs", dir / "toy.labels"};
}

// Vertex names of the toy graph.
inline constexpr NodeId a = 0, b = 1, c = 2, d = 3, e = 4;

inline AttributedGraph toy_graph() { return load_graph(toy_files()).graph; }

/// A fresh, empty scratch directory under the build tree's temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("neural_brane_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Random connected-ish tiny graph with random attribute sets, suitable for
/// finite-difference checks. Guarantees at least one valid triplet.
struct TinyInstance {
    AttributedGraph graph;
    ModelParameters params;
    Triplet triplet;
};

inline AttributedGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t m, double p_edge,
                                    double p_attr) {
    std::bernoulli_distribution edge(p_edge), attr(p_attr);
    std::uniform_real_distribution<double> w(0.5, 2.0);
    GraphBuilder builder;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (edge(rng)) builder.add_edge(u, v, w(rng));
        }
        std::vector<AttrId> attrs;
        for (AttrId k = 0; k < m; ++k) {
            if (attr(rng)) attrs.push_back(k);
        }
        builder.set_attributes(u, std::move(attrs));
    }
    return builder.build(n, m);
}

/// Every (u, i, j) that satisfies the triplet invariants.
inline std::vector<Triplet> all_triplets(const AttributedGraph& g) {
    std::vector<Triplet> out;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId i : g.neighbors(u)) {
            for (NodeId j = 0; j < g.node_count(); ++j) {
                if (j != u && j != i && !g.has_edge(u, j)) out.push_back({u, i, j});
            }
        }
    }
    return out;
}

/// Parameters are scaled up from the default init so that activations,
/// margins and max-pool gaps are well away from zero.
inline TinyInstance random_instance(std::mt19937_64& rng, double param_scale = 1.0) {
    std::uniform_int_distribution<std::size_t> n_dist(4, 8), m_dist(2, 10), d_dist(1, 4), h_dist(1, 5);
    for (;;) {
        const std::size_t n = n_dist(rng), m = m_dist(rng);
        AttributedGraph g = random_graph(rng, n, m, 0.45, 0.4);
        const auto triplets = all_triplets(g);
        if (triplets.empty()) continue;
        const std::size_t d = d_dist(rng);
        ModelParameters p = init_parameters(n, m, d, d, h_dist(rng), rng());
        const auto scale = [param_scale](Matrix& x) {
            for (double& v : x.data()) v *= 100.0 * param_scale;
        };
        scale(p.attr_embedding);
        scale(p.nbr_embedding);
        scale(p.hidden_weights);
        for (double& v : p.hidden_bias) v *= 100.0 * param_scale;
        const Triplet t = triplets[std::uniform_int_distribution<std::size_t>(0, triplets.size() - 1)(rng)];
        return {std::move(g), std::move(p), t};
    }
}

} // namespace nb_test

#endif // NEURAL_BRANE_TESTS_SUPPORT_HPP
