#include "neural_brane/model.hpp"

#include "neural_brane/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace neural_brane {

Pooling parse_pooling(std::string_view name) {
    if (name == "max") return Pooling::max;
    if (name == "sum") return Pooling::sum;
    throw InputError("unknown pooling '" + std::string(name) + "' (expected max or sum)");
}

std::string_view to_string(Pooling p) { return p == Pooling::max ? "max" : "sum"; }

ExportLayer parse_export_layer(std::string_view name) {
    if (name == "h") return ExportLayer::hidden;
    if (name == "f") return ExportLayer::features;
    throw InputError("unknown export layer '" + std::string(name) + "' (expected f or h)");
}

namespace {

bool finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

bool ModelParameters::all_finite() const {
    return finite(attr_embedding.data()) && finite(nbr_embedding.data()) &&
           finite(hidden_weights.data()) && finite(hidden_bias);
}

void ModelParameters::check_shapes(std::size_t node_count, std::size_t attribute_count) const {
    if (attr_embedding.rows() != attribute_count)
        throw InputError("attribute embedding has " + std::to_string(attr_embedding.rows()) +
                         " rows, graph has " + std::to_string(attribute_count) + " attributes");
    if (nbr_embedding.rows() != node_count)
        throw InputError("neighbor embedding has " + std::to_string(nbr_embedding.rows()) +
                         " rows, graph has " + std::to_string(node_count) + " nodes");
    if (hidden_weights.rows() != hidden_bias.size() || hidden_weights.cols() != dim())
        throw InputError("hidden layer shape does not match embedding widths");
}

ModelParameters init_parameters(std::size_t nodes, std::size_t attributes, std::size_t attr_dim,
                                std::size_t nbr_dim, std::size_t hidden, std::uint64_t seed) {
    if (nodes == 0 || attributes == 0 || attr_dim == 0 || nbr_dim == 0 || hidden == 0)
        throw InputError("all model dimensions must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, kInitStddev);
    auto draw = [&](std::span<double> xs) {
        for (double& x : xs) x = gauss(rng);
    };
    ModelParameters p;
    p.attr_embedding = Matrix(attributes, attr_dim);
    p.nbr_embedding = Matrix(nodes, nbr_dim);
    p.hidden_weights = Matrix(hidden, attr_dim + nbr_dim);
    p.hidden_bias.assign(hidden, 0.0);
    draw(p.attr_embedding.data());
    draw(p.nbr_embedding.data());
    draw(p.hidden_weights.data());
    draw(p.hidden_bias);
    return p;
}

PooledVector pool_rows(const Matrix& table, std::span<const std::uint32_t> rows, Pooling pooling) {
    PooledVector out;
    const std::size_t d = table.cols();
    out.values.assign(d, 0.0);
    if (rows.empty()) return out;

    if (pooling == Pooling::sum) {
        for (auto r : rows) {
            auto src = table.row(r);
            for (std::size_t k = 0; k < d; ++k) out.values[k] += src[k];
        }
        return out;
    }

    auto first = table.row(rows[0]);
    std::copy(first.begin(), first.end(), out.values.begin());
    out.argmax.assign(d, 0);
    for (std::size_t idx = 1; idx < rows.size(); ++idx) {
        auto src = table.row(rows[idx]);
        for (std::size_t k = 0; k < d; ++k) {
            // Strict comparison keeps the earliest row on ties.
            if (src[k] > out.values[k]) {
                out.values[k] = src[k];
                out.argmax[k] = static_cast<std::uint32_t>(idx);
            }
        }
    }
    return out;
}

PooledVector encode_attributes(const ModelParameters& params, const AttributedGraph& g, NodeId u,
                               Pooling pooling) {
    return pool_rows(params.attr_embedding, g.attributes(u), pooling);
}

PooledVector encode_neighbors(const ModelParameters& params, const AttributedGraph& g, NodeId u,
                              Pooling pooling) {
    return pool_rows(params.nbr_embedding, g.neighbors(u), pooling);
}

std::vector<double> integrate(std::span<const double> v_attr, std::span<const double> v_nbr,
                              FeatureLayout layout) {
    if (v_attr.size() != layout.attr_dim || v_nbr.size() != layout.nbr_dim)
        throw std::invalid_argument("integrate: expected halves of length " +
                                    std::to_string(layout.attr_dim) + " and " +
                                    std::to_string(layout.nbr_dim));
    std::vector<double> f;
    f.reserve(layout.dim());
    f.insert(f.end(), v_attr.begin(), v_attr.end());
    f.insert(f.end(), v_nbr.begin(), v_nbr.end());
    return f;
}

namespace {

void hidden_into(const ModelParameters& params, std::span<const double> f,
                 std::vector<double>& pre, std::vector<double>& act) {
    const std::size_t h = params.hidden_dim();
    const std::size_t d = params.dim();
    if (f.size() != d) throw std::invalid_argument("hidden: feature vector has wrong length");
    pre.resize(h);
    act.resize(h);
    for (std::size_t r = 0; r < h; ++r) {
        auto w = params.hidden_weights.row(r);
        double z = params.hidden_bias[r];
        for (std::size_t k = 0; k < d; ++k) z += w[k] * f[k];
        pre[r] = z;
        act[r] = z > 0.0 ? z : 0.0;
    }
}

} // namespace

HiddenOutput hidden(const ModelParameters& params, std::span<const double> f) {
    HiddenOutput out;
    hidden_into(params, f, out.pre_activation, out.activation);
    return out;
}

void forward(const ModelParameters& params, const AttributedGraph& g, NodeId u, Pooling pooling,
             ForwardTrace& trace) {
    trace.node = u;
    auto attrs = g.attributes(u);
    auto nbrs = g.neighbors(u);
    trace.attr_rows.assign(attrs.begin(), attrs.end());
    trace.nbr_rows.assign(nbrs.begin(), nbrs.end());

    PooledVector va = pool_rows(params.attr_embedding, attrs, pooling);
    PooledVector vn = pool_rows(params.nbr_embedding, nbrs, pooling);
    trace.attr_argmax = std::move(va.argmax);
    trace.nbr_argmax = std::move(vn.argmax);

    trace.f.resize(params.dim());
    std::copy(va.values.begin(), va.values.end(), trace.f.begin());
    std::copy(vn.values.begin(), vn.values.end(), trace.f.begin() + static_cast<std::ptrdiff_t>(params.attr_dim()));
    hidden_into(params, trace.f, trace.pre_activation, trace.h);
}

ForwardTrace forward(const ModelParameters& params, const AttributedGraph& g, NodeId u,
                     Pooling pooling) {
    ForwardTrace trace;
    forward(params, g, u, pooling, trace);
    return trace;
}

double similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("similarity: length mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

bool EmbeddingTable::all_finite() const { return finite(vectors.data()); }

EmbeddingTable embed_all(const ModelParameters& params, const AttributedGraph& g, Pooling pooling,
                         ExportLayer layer, unsigned threads) {
    params.check_shapes(g.node_count(), g.attribute_count());
    const std::size_t n = g.node_count();
    const std::size_t width = layer == ExportLayer::hidden ? params.hidden_dim() : params.dim();
    EmbeddingTable table{Matrix(n, width)};

    auto work = [&](std::size_t begin, std::size_t end) {
        ForwardTrace trace;
        for (std::size_t u = begin; u < end; ++u) {
            forward(params, g, static_cast<NodeId>(u), pooling, trace);
            const auto& src = layer == ExportLayer::hidden ? trace.h : trace.f;
            std::copy(src.begin(), src.end(), table.vectors.row(u).begin());
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        work(0, n);
        return table;
    }
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t begin = t * chunk, end = std::min(n, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
    }
    return table;
}

} // namespace neural_brane
