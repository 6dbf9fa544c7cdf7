#ifndef NEURAL_BRANE_MODEL_HPP
#define NEURAL_BRANE_MODEL_HPP

#include "neural_brane/graph.hpp"
#include "neural_brane/matrix.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace neural_brane {

enum class Pooling { max, sum };

Pooling parse_pooling(std::string_view name);
std::string_view to_string(Pooling p);

/// Widths of the two halves of the integrated feature vector f.
struct FeatureLayout {
    std::size_t attr_dim = 0;
    std::size_t nbr_dim = 0;
    std::size_t dim() const noexcept { return attr_dim + nbr_dim; }
};

/// Learnable parameters: attribute embeddings (m x d1), neighbor embeddings
/// (n x d2), hidden weights (h x d) and hidden bias (h).
struct ModelParameters {
    Matrix attr_embedding;
    Matrix nbr_embedding;
    Matrix hidden_weights;
    std::vector<double> hidden_bias;

    std::size_t attr_dim() const noexcept { return attr_embedding.cols(); }
    std::size_t nbr_dim() const noexcept { return nbr_embedding.cols(); }
    std::size_t dim() const noexcept { return attr_dim() + nbr_dim(); }
    std::size_t hidden_dim() const noexcept { return hidden_bias.size(); }
    FeatureLayout layout() const noexcept { return {attr_dim(), nbr_dim()}; }

    bool all_finite() const;
    /// Throws InputError unless the blocks have consistent shapes for a graph
    /// with the given node and attribute counts.
    void check_shapes(std::size_t node_count, std::size_t attribute_count) const;

    friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

inline constexpr double kInitStddev = 0.01;

/// Every entry i.i.d. Normal(0, 0.01^2), drawn in the order P, P', W, b from
/// a generator seeded with `seed`. Throws InputError on a zero dimension.
ModelParameters init_parameters(std::size_t nodes, std::size_t attributes, std::size_t attr_dim,
                                std::size_t nbr_dim, std::size_t hidden, std::uint64_t seed);

/// Result of pooling a stack of looked-up rows. `argmax[k]` indexes into the
/// row list and is only filled for max pooling over a nonempty list.
struct PooledVector {
    std::vector<double> values;
    std::vector<std::uint32_t> argmax;
};

/// Pools the rows of `table` selected by `rows`. An empty selection yields
/// the zero vector. Max pooling breaks ties towards the earliest row.
PooledVector pool_rows(const Matrix& table, std::span<const std::uint32_t> rows, Pooling pooling);

PooledVector encode_attributes(const ModelParameters& params, const AttributedGraph& g, NodeId u,
                               Pooling pooling = Pooling::max);
PooledVector encode_neighbors(const ModelParameters& params, const AttributedGraph& g, NodeId u,
                              Pooling pooling = Pooling::max);

/// f = v_attr || v_nbr. Throws std::invalid_argument if the halves do not
/// match `layout`.
std::vector<double> integrate(std::span<const double> v_attr, std::span<const double> v_nbr,
                              FeatureLayout layout);

struct HiddenOutput {
    std::vector<double> pre_activation;
    std::vector<double> activation;
};

/// h = ReLU(W f + b).
HiddenOutput hidden(const ModelParameters& params, std::span<const double> f);

/// Every intermediate of one node's forward pass that backprop needs.
struct ForwardTrace {
    NodeId node = 0;
    std::vector<AttrId> attr_rows;
    std::vector<NodeId> nbr_rows;
    std::vector<std::uint32_t> attr_argmax;
    std::vector<std::uint32_t> nbr_argmax;
    std::vector<double> f;
    std::vector<double> pre_activation;
    std::vector<double> h;
};

ForwardTrace forward(const ModelParameters& params, const AttributedGraph& g, NodeId u,
                     Pooling pooling = Pooling::max);
/// Same as above but reuses the buffers in `trace`.
void forward(const ModelParameters& params, const AttributedGraph& g, NodeId u, Pooling pooling,
             ForwardTrace& trace);

double similarity(std::span<const double> a, std::span<const double> b);

/// Logistic function, evaluated without overflow for any finite x.
double sigmoid(double x);
/// log(1 + e^x) without overflow; -ln sigmoid(x) == softplus(-x).
double softplus(double x);

/// P(s_ui > s_uj) = sigmoid(s_ui - s_uj).
inline double bpr_probability(double s_ui, double s_uj) { return sigmoid(s_ui - s_uj); }

enum class ExportLayer { features, hidden };

ExportLayer parse_export_layer(std::string_view name);

/// Node representation matrix, one row per node.
struct EmbeddingTable {
    Matrix vectors;

    std::size_t node_count() const noexcept { return vectors.rows(); }
    std::size_t dim() const noexcept { return vectors.cols(); }
    bool all_finite() const;

    friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

/// Rows are forward(u).h (or .f for ExportLayer::features). Read-only over
/// params, so `threads > 1` splits nodes across threads with identical output.
EmbeddingTable embed_all(const ModelParameters& params, const AttributedGraph& g,
                         Pooling pooling = Pooling::max, ExportLayer layer = ExportLayer::hidden,
                         unsigned threads = 1);

} // namespace neural_brane

#endif // NEURAL_BRANE_MODEL_HPP
