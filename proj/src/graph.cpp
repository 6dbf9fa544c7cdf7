#include "neural_brane/graph.hpp"

#include "neural_brane/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

namespace neural_brane {

namespace {

void check_node(const AttributedGraph& g, NodeId u) {
    if (u >= g.node_count())
        throw std::out_of_range("node id " + std::to_string(u) + " out of range");
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename Int>
Int parse_id(std::string_view tok, const std::string& path, std::size_t line_no, const char* what) {
    Int value{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(path, line_no, std::string("invalid ") + what + " '" + std::string(tok) + "'");
    return value;
}

double parse_weight(std::string_view tok, const std::string& path, std::size_t line_no) {
    // from_chars for double is available in libstdc++ 11.
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(path, line_no, "invalid weight '" + std::string(tok) + "'");
    if (!(value > 0.0) || !std::isfinite(value))
        throw ParseError(path, line_no, "edge weight must be positive and finite");
    return value;
}

/// Calls fn(tokens, line_no) for every non-blank, non-comment line.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto toks = split_ws(line);
        if (toks.empty() || toks.front().front() == '#') continue;
        fn(toks, line_no);
    }
}

} // namespace

std::span<const NodeId> AttributedGraph::neighbors(NodeId u) const {
    check_node(*this, u);
    return {nbr_ids_.data() + nbr_offsets_[u], nbr_offsets_[u + 1] - nbr_offsets_[u]};
}

std::span<const double> AttributedGraph::weights(NodeId u) const {
    check_node(*this, u);
    return {nbr_weights_.data() + nbr_offsets_[u], nbr_offsets_[u + 1] - nbr_offsets_[u]};
}

std::span<const AttrId> AttributedGraph::attributes(NodeId u) const {
    check_node(*this, u);
    return {attr_ids_.data() + attr_offsets_[u], attr_offsets_[u + 1] - attr_offsets_[u]};
}

bool AttributedGraph::has_edge(NodeId u, NodeId v) const {
    auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::optional<double> AttributedGraph::weight(NodeId u, NodeId v) const {
    auto nbrs = neighbors(u);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
    if (it == nbrs.end() || *it != v) return std::nullopt;
    return weights(u)[static_cast<std::size_t>(it - nbrs.begin())];
}

void GraphBuilder::add_edge(NodeId u, NodeId v, double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw InputError("edge weight must be positive and finite");
    if (u == v) {
        // The node still exists; only the loop itself is discarded.
        ++self_loops_;
        loop_max_node_ = std::max<std::size_t>(loop_max_node_, std::size_t{u} + 1);
        return;
    }
    edges_.emplace_back(std::min(u, v), std::max(u, v), weight);
}

void GraphBuilder::set_attributes(NodeId u, std::vector<AttrId> attrs) {
    attrs_.emplace_back(u, std::move(attrs));
}

void GraphBuilder::set_label(NodeId u, ClassId label) {
    if (label < 0) throw InputError("class ids must be non-negative");
    labels_.emplace_back(u, label);
}

AttributedGraph GraphBuilder::build(std::optional<std::size_t> node_count,
                                    std::optional<std::size_t> attribute_count) const {
    std::size_t max_node = loop_max_node_, max_attr = 0;
    for (auto& [u, v, w] : edges_) max_node = std::max<std::size_t>(max_node, v + 1);
    for (auto& [u, row] : attrs_) {
        max_node = std::max<std::size_t>(max_node, u + 1);
        for (AttrId a : row) max_attr = std::max<std::size_t>(max_attr, a + 1);
    }
    for (auto& [u, c] : labels_) max_node = std::max<std::size_t>(max_node, u + 1);

    const std::size_t n = node_count.value_or(max_node);
    const std::size_t m = attribute_count.value_or(max_attr);
    if (max_node > n)
        throw InputError("node id " + std::to_string(max_node - 1) + " outside declared node range " +
                         std::to_string(n));
    if (max_attr > m)
        throw InputError("attribute id " + std::to_string(max_attr - 1) +
                         " outside declared attribute range " + std::to_string(m));
    if (n > std::numeric_limits<NodeId>::max())
        throw InputError("too many nodes");

    // Canonical undirected edge set, keyed by (min, max).
    std::map<std::pair<NodeId, NodeId>, double> edge_set;
    std::size_t duplicates = 0;
    for (auto& [u, v, w] : edges_) {
        auto [it, inserted] = edge_set.emplace(std::make_pair(u, v), w);
        if (!inserted) ++duplicates;
        if (!inserted && it->second != w)
            throw InputError("conflicting weights for edge " + std::to_string(u) + " " +
                             std::to_string(v));
    }

    duplicates_ = duplicates;

    AttributedGraph g;
    g.node_count_ = n;
    g.attribute_count_ = m;

    std::vector<std::size_t> deg(n, 0);
    for (auto& [key, w] : edge_set) {
        ++deg[key.first];
        ++deg[key.second];
    }
    g.nbr_offsets_.assign(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) g.nbr_offsets_[u + 1] = g.nbr_offsets_[u] + deg[u];
    g.nbr_ids_.resize(g.nbr_offsets_[n]);
    g.nbr_weights_.resize(g.nbr_offsets_[n]);
    std::vector<std::size_t> cursor(g.nbr_offsets_.begin(), g.nbr_offsets_.end() - 1);
    for (auto& [key, w] : edge_set) {
        auto [u, v] = key;
        g.nbr_ids_[cursor[u]] = v;
        g.nbr_weights_[cursor[u]++] = w;
        g.nbr_ids_[cursor[v]] = u;
        g.nbr_weights_[cursor[v]++] = w;
    }
    std::vector<std::pair<NodeId, double>> tmp;
    for (std::size_t u = 0; u < n; ++u) {
        auto first = g.nbr_offsets_[u], last = g.nbr_offsets_[u + 1];
        tmp.clear();
        for (auto k = first; k < last; ++k) tmp.emplace_back(g.nbr_ids_[k], g.nbr_weights_[k]);
        std::sort(tmp.begin(), tmp.end());
        for (auto k = first; k < last; ++k) {
            g.nbr_ids_[k] = tmp[k - first].first;
            g.nbr_weights_[k] = tmp[k - first].second;
        }
    }

    std::vector<std::vector<AttrId>> rows(n);
    std::vector<bool> seen(n, false);
    for (auto& [u, row] : attrs_) {
        if (seen[u]) throw InputError("duplicate attribute row for node " + std::to_string(u));
        seen[u] = true;
        rows[u] = row;
        std::sort(rows[u].begin(), rows[u].end());
        rows[u].erase(std::unique(rows[u].begin(), rows[u].end()), rows[u].end());
    }
    g.attr_offsets_.assign(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) {
        g.attr_offsets_[u + 1] = g.attr_offsets_[u] + rows[u].size();
        g.attr_ids_.insert(g.attr_ids_.end(), rows[u].begin(), rows[u].end());
    }

    if (!labels_.empty()) {
        g.labels_.assign(n, kUnlabeled);
        for (auto& [u, c] : labels_) {
            if (g.labels_[u] != kUnlabeled && g.labels_[u] != c)
                throw InputError("conflicting labels for node " + std::to_string(u));
            g.labels_[u] = c;
        }
    }
    return g;
}

LoadedGraph load_graph(const GraphFiles& files, const LoadOptions& options) {
    GraphBuilder builder;

    const std::string edge_path = files.edges.string();
    for_each_record(files.edges, [&](const auto& toks, std::size_t line_no) {
        if (toks.size() != 2 && toks.size() != 3)
            throw ParseError(edge_path, line_no, "expected '<src> <dst> [weight]'");
        auto u = parse_id<NodeId>(toks[0], edge_path, line_no, "node id");
        auto v = parse_id<NodeId>(toks[1], edge_path, line_no, "node id");
        double w = toks.size() == 3 ? parse_weight(toks[2], edge_path, line_no) : 1.0;
        try {
            builder.add_edge(u, v, w);
        } catch (const InputError& e) {
            throw ParseError(edge_path, line_no, e.what());
        }
    });

    const std::string attr_path = files.attributes.string();
    for_each_record(files.attributes, [&](const auto& toks, std::size_t line_no) {
        auto u = parse_id<NodeId>(toks[0], attr_path, line_no, "node id");
        std::vector<AttrId> row;
        row.reserve(toks.size() - 1);
        for (std::size_t k = 1; k < toks.size(); ++k)
            row.push_back(parse_id<AttrId>(toks[k], attr_path, line_no, "attribute id"));
        if (options.node_count && u >= *options.node_count)
            throw ParseError(attr_path, line_no, "node id outside declared node range");
        if (options.attribute_count)
            for (AttrId a : row)
                if (a >= *options.attribute_count)
                    throw ParseError(attr_path, line_no, "attribute id outside declared range");
        builder.set_attributes(u, std::move(row));
    });

    if (files.labels) {
        const std::string label_path = files.labels->string();
        for_each_record(*files.labels, [&](const auto& toks, std::size_t line_no) {
            if (toks.size() != 2) throw ParseError(label_path, line_no, "expected '<node> <class>'");
            auto u = parse_id<NodeId>(toks[0], label_path, line_no, "node id");
            auto c = parse_id<ClassId>(toks[1], label_path, line_no, "class id");
            if (c < 0) throw ParseError(label_path, line_no, "class ids must be non-negative");
            if (options.node_count && u >= *options.node_count)
                throw ParseError(label_path, line_no, "node id outside declared node range");
            builder.set_label(u, c);
        });
    }

    LoadedGraph out;
    out.graph = builder.build(options.node_count, options.attribute_count);
    out.self_loops_dropped = builder.self_loops_dropped();
    out.duplicate_edges = builder.duplicate_edges();
    return out;
}

void write_graph(const AttributedGraph& g, const GraphFiles& files) {
    std::ofstream edges(files.edges);
    if (!edges) throw InputError("cannot write " + files.edges.string());
    edges.precision(17);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        auto nbrs = g.neighbors(u);
        auto ws = g.weights(u);
        for (std::size_t k = 0; k < nbrs.size(); ++k)
            if (u < nbrs[k]) edges << u << ' ' << nbrs[k] << ' ' << ws[k] << '\n';
    }

    std::ofstream attrs(files.attributes);
    if (!attrs) throw InputError("cannot write " + files.attributes.string());
    for (NodeId u = 0; u < g.node_count(); ++u) {
        attrs << u;
        for (AttrId a : g.attributes(u)) attrs << ' ' << a;
        attrs << '\n';
    }

    if (files.labels && g.has_labels()) {
        std::ofstream labels(*files.labels);
        if (!labels) throw InputError("cannot write " + files.labels->string());
        for (NodeId u = 0; u < g.node_count(); ++u)
            if (g.label(u) != kUnlabeled) labels << u << ' ' << g.label(u) << '\n';
    }
}

std::vector<std::size_t> degree_vector(const AttributedGraph& g) {
    std::vector<std::size_t> deg(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) deg[u] = g.degree(u);
    return deg;
}

} // namespace neural_brane
