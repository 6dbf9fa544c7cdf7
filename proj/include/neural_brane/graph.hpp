#ifndef NEURAL_BRANE_GRAPH_HPP
#define NEURAL_BRANE_GRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

namespace neural_brane {

using NodeId = std::uint32_t;
using AttrId = std::uint32_t;
using ClassId = std::int32_t;

inline constexpr ClassId kUnlabeled = -1;

/// Undirected weighted graph whose nodes carry sparse binary attribute sets
/// and, optionally, class labels. Immutable once built; adjacency and
/// attributes are stored in CSR form with ids sorted per node.
class AttributedGraph {
public:
    AttributedGraph() = default;

    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t attribute_count() const noexcept { return attribute_count_; }
    /// Number of undirected edges.
    std::size_t edge_count() const noexcept { return nbr_ids_.size() / 2; }

    std::span<const NodeId> neighbors(NodeId u) const;
    std::span<const double> weights(NodeId u) const;
    std::span<const AttrId> attributes(NodeId u) const;
    std::size_t degree(NodeId u) const { return neighbors(u).size(); }

    bool has_edge(NodeId u, NodeId v) const;
    std::optional<double> weight(NodeId u, NodeId v) const;

    bool has_labels() const noexcept { return !labels_.empty(); }
    /// kUnlabeled for nodes without a label.
    ClassId label(NodeId u) const { return labels_.empty() ? kUnlabeled : labels_[u]; }
    std::span<const ClassId> labels() const noexcept { return labels_; }

    friend bool operator==(const AttributedGraph&, const AttributedGraph&) = default;

private:
    friend class GraphBuilder;

    std::size_t node_count_ = 0;
    std::size_t attribute_count_ = 0;
    std::vector<std::size_t> nbr_offsets_{0};
    std::vector<NodeId> nbr_ids_;
    std::vector<double> nbr_weights_;
    std::vector<std::size_t> attr_offsets_{0};
    std::vector<AttrId> attr_ids_;
    std::vector<ClassId> labels_;
};

/// Collects edges, attribute rows and labels, then validates and freezes
/// them into an AttributedGraph. Throws InputError on violations.
class GraphBuilder {
public:
    /// Adds the undirected edge {u, v}. A repeat with the same weight is
    /// ignored; a repeat with a different weight is an error. Self-loops are
    /// dropped and counted.
    void add_edge(NodeId u, NodeId v, double weight = 1.0);
    void set_attributes(NodeId u, std::vector<AttrId> attrs);
    void set_label(NodeId u, ClassId label);

    /// Node and attribute counts default to max observed id + 1.
    AttributedGraph build(std::optional<std::size_t> node_count = std::nullopt,
                          std::optional<std::size_t> attribute_count = std::nullopt) const;

    std::size_t self_loops_dropped() const noexcept { return self_loops_; }
    std::size_t duplicate_edges() const noexcept { return duplicates_; }

private:
    std::vector<std::tuple<NodeId, NodeId, double>> edges_;
    std::vector<std::pair<NodeId, std::vector<AttrId>>> attrs_;
    std::vector<std::pair<NodeId, ClassId>> labels_;
    std::size_t self_loops_ = 0;
    std::size_t loop_max_node_ = 0;
    mutable std::size_t duplicates_ = 0;
};

struct GraphFiles {
    std::filesystem::path edges;
    std::filesystem::path attributes;
    std::optional<std::filesystem::path> labels;
};

struct LoadOptions {
    std::optional<std::size_t> node_count;
    std::optional<std::size_t> attribute_count;
};

struct LoadedGraph {
    AttributedGraph graph;
    std::size_t self_loops_dropped = 0;
    std::size_t duplicate_edges = 0;
};

/// Reads the whitespace-separated edge, attribute and label files.
/// Errors carry the file path and 1-based line number.
LoadedGraph load_graph(const GraphFiles& files, const LoadOptions& options = {});

/// Writes g in the format load_graph reads. Each undirected edge is written
/// once (u < v) and every node gets an attribute line, even an empty one.
void write_graph(const AttributedGraph& g, const GraphFiles& files);

std::vector<std::size_t> degree_vector(const AttributedGraph& g);

} // namespace neural_brane

#endif // NEURAL_BRANE_GRAPH_HPP
