#include "neural_brane/trainer.hpp"

#include "neural_brane/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace neural_brane {

GradAggregation parse_grad_aggregation(std::string_view name) {
    if (name == "mean") return GradAggregation::mean;
    if (name == "sum") return GradAggregation::sum;
    throw InputError("unknown gradient aggregation '" + std::string(name) + "' (expected mean or sum)");
}

void TrainConfig::validate() const {
    if (attr_dim == 0 || nbr_dim == 0 || hidden == 0)
        throw InputError("d1, d2 and hidden must be at least 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw InputError("learning rate must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be non-negative");
    if (batch_size == 0) throw InputError("batch size must be positive");
    if (epochs == 0) throw InputError("epochs must be positive");
    if (!(convergence_tol >= 0.0)) throw InputError("convergence tolerance must be non-negative");
    if (triplets_per_epoch && *triplets_per_epoch == 0)
        throw InputError("triplets per epoch must be positive");
}

std::span<double> SparseRowGradient::row(std::uint32_t key) {
    auto [it, inserted] = slot_.try_emplace(key, keys_.size());
    if (inserted) {
        keys_.push_back(key);
        values_.resize(values_.size() + cols_, 0.0);
    }
    return {values_.data() + it->second * cols_, cols_};
}

std::span<const double> SparseRowGradient::find(std::uint32_t key) const {
    auto it = slot_.find(key);
    if (it == slot_.end()) return {};
    return {values_.data() + it->second * cols_, cols_};
}

void SparseRowGradient::clear() {
    keys_.clear();
    values_.clear();
    slot_.clear();
}

GradientSet::GradientSet(const ModelParameters& params)
    : attr(params.attr_dim()),
      nbr(params.nbr_dim()),
      weights(params.hidden_dim(), params.dim()),
      bias(params.hidden_dim(), 0.0) {}

void GradientSet::clear() {
    attr.clear();
    nbr.clear();
    weights.fill(0.0);
    std::fill(bias.begin(), bias.end(), 0.0);
}

bool GradientSet::all_finite() const {
    auto ok = [](std::span<const double> xs) {
        return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
    };
    for (std::size_t s = 0; s < attr.size(); ++s)
        if (!ok(attr.row_at(s))) return false;
    for (std::size_t s = 0; s < nbr.size(); ++s)
        if (!ok(nbr.row_at(s))) return false;
    return ok(weights.data()) && ok(bias);
}

namespace {

double squared_norm(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x * x;
    return s;
}

std::vector<std::uint32_t> distinct_rows(std::span<const std::uint32_t> a,
                                         std::span<const std::uint32_t> b,
                                         std::span<const std::uint32_t> c) {
    std::vector<std::uint32_t> rows;
    rows.reserve(a.size() + b.size() + c.size());
    rows.insert(rows.end(), a.begin(), a.end());
    rows.insert(rows.end(), b.begin(), b.end());
    rows.insert(rows.end(), c.begin(), c.end());
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

double regularization_value(const ModelParameters& params, const ForwardTrace& tu,
                            const ForwardTrace& ti, const ForwardTrace& tj, double lambda) {
    if (lambda == 0.0) return 0.0;
    double sq = squared_norm(params.hidden_weights.data()) + squared_norm(params.hidden_bias);
    for (auto r : distinct_rows(tu.attr_rows, ti.attr_rows, tj.attr_rows))
        sq += squared_norm(params.attr_embedding.row(r));
    for (auto r : distinct_rows(tu.nbr_rows, ti.nbr_rows, tj.nbr_rows))
        sq += squared_norm(params.nbr_embedding.row(r));
    return lambda * sq;
}

/// Routes d(loss)/d(pooled vector) back to the looked-up rows.
void backprop_pool(std::span<const double> grad, std::span<const std::uint32_t> rows,
                   std::span<const std::uint32_t> argmax, Pooling pooling, double scale,
                   SparseRowGradient& out) {
    if (rows.empty()) return;
    if (pooling == Pooling::sum) {
        for (auto r : rows) {
            auto dst = out.row(r);
            for (std::size_t k = 0; k < grad.size(); ++k) dst[k] += scale * grad[k];
        }
        return;
    }
    for (std::size_t k = 0; k < grad.size(); ++k) {
        if (grad[k] == 0.0) continue;
        out.row(rows[argmax[k]])[k] += scale * grad[k];
    }
}

/// Backprop from d(loss)/dh for one node through ReLU, the hidden layer,
/// the concatenation and the pooling.
void backprop_node(const ModelParameters& params, const ForwardTrace& trace,
                   std::span<const double> grad_h, Pooling pooling, double scale,
                   GradientSet& grads, std::vector<double>& grad_z, std::vector<double>& grad_f) {
    const std::size_t h = params.hidden_dim();
    const std::size_t d = params.dim();
    grad_z.assign(h, 0.0);
    grad_f.assign(d, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        // ReLU subgradient at exactly 0 is taken as 0.
        if (trace.pre_activation[r] <= 0.0 || grad_h[r] == 0.0) continue;
        const double gz = grad_h[r];
        grad_z[r] = gz;
        grads.bias[r] += scale * gz;
        auto w = params.hidden_weights.row(r);
        auto gw = grads.weights.row(r);
        for (std::size_t k = 0; k < d; ++k) {
            gw[k] += scale * gz * trace.f[k];
            grad_f[k] += gz * w[k];
        }
    }
    const std::size_t d1 = params.attr_dim();
    std::span<const double> gf(grad_f);
    backprop_pool(gf.first(d1), trace.attr_rows, trace.attr_argmax, pooling, scale, grads.attr);
    backprop_pool(gf.subspan(d1), trace.nbr_rows, trace.nbr_argmax, pooling, scale, grads.nbr);
}

void accumulate_regularization(const ModelParameters& params, const ForwardTrace& tu,
                               const ForwardTrace& ti, const ForwardTrace& tj, double lambda,
                               double scale, GradientSet& grads) {
    if (lambda == 0.0) return;
    const double c = 2.0 * lambda * scale;
    auto decay = [c](std::span<const double> src, std::span<double> dst) {
        for (std::size_t k = 0; k < src.size(); ++k) dst[k] += c * src[k];
    };
    for (auto r : distinct_rows(tu.attr_rows, ti.attr_rows, tj.attr_rows))
        decay(params.attr_embedding.row(r), grads.attr.row(r));
    for (auto r : distinct_rows(tu.nbr_rows, ti.nbr_rows, tj.nbr_rows))
        decay(params.nbr_embedding.row(r), grads.nbr.row(r));
    decay(params.hidden_weights.data(), grads.weights.data());
    decay(params.hidden_bias, grads.bias);
}

struct TripletWorkspace {
    ForwardTrace tu, ti, tj;
    std::vector<double> grad_hu, grad_hi, grad_hj, grad_z, grad_f;
};

LossTerms accumulate_with(const ModelParameters& params, const AttributedGraph& g,
                          const Triplet& t, double lambda, Pooling pooling, double scale,
                          GradientSet& grads, TripletWorkspace& ws) {
    forward(params, g, t.u, pooling, ws.tu);
    forward(params, g, t.i, pooling, ws.ti);
    forward(params, g, t.j, pooling, ws.tj);
    const double x = similarity(ws.tu.h, ws.ti.h) - similarity(ws.tu.h, ws.tj.h);

    LossTerms loss;
    loss.ranking = softplus(-x);
    loss.regularization = regularization_value(params, ws.tu, ws.ti, ws.tj, lambda);

    // d(-ln sigmoid(x))/dx = -(1 - sigmoid(x)) = -sigmoid(-x)
    const double delta = -sigmoid(-x);
    const std::size_t h = params.hidden_dim();
    ws.grad_hu.resize(h);
    ws.grad_hi.resize(h);
    ws.grad_hj.resize(h);
    for (std::size_t r = 0; r < h; ++r) {
        ws.grad_hu[r] = delta * (ws.ti.h[r] - ws.tj.h[r]);
        ws.grad_hi[r] = delta * ws.tu.h[r];
        ws.grad_hj[r] = -delta * ws.tu.h[r];
    }
    backprop_node(params, ws.tu, ws.grad_hu, pooling, scale, grads, ws.grad_z, ws.grad_f);
    backprop_node(params, ws.ti, ws.grad_hi, pooling, scale, grads, ws.grad_z, ws.grad_f);
    backprop_node(params, ws.tj, ws.grad_hj, pooling, scale, grads, ws.grad_z, ws.grad_f);
    accumulate_regularization(params, ws.tu, ws.ti, ws.tj, lambda, scale, grads);
    return loss;
}

} // namespace

LossTerms triplet_loss_terms(const ModelParameters& params, const AttributedGraph& g,
                             const Triplet& t, double lambda, Pooling pooling) {
    auto tu = forward(params, g, t.u, pooling);
    auto ti = forward(params, g, t.i, pooling);
    auto tj = forward(params, g, t.j, pooling);
    const double x = similarity(tu.h, ti.h) - similarity(tu.h, tj.h);
    return {softplus(-x), regularization_value(params, tu, ti, tj, lambda)};
}

LossTerms accumulate_triplet_gradients(const ModelParameters& params, const AttributedGraph& g,
                                       const Triplet& t, double lambda, Pooling pooling,
                                       double scale, GradientSet& grads) {
    TripletWorkspace ws;
    return accumulate_with(params, g, t, lambda, pooling, scale, grads, ws);
}

GradientSet triplet_gradients(const ModelParameters& params, const AttributedGraph& g,
                              const Triplet& t, double lambda, Pooling pooling) {
    GradientSet grads(params);
    accumulate_triplet_gradients(params, g, t, lambda, pooling, 1.0, grads);
    return grads;
}

void apply_update(ModelParameters& params, const GradientSet& grads, double learning_rate) {
    if (!grads.all_finite()) throw NumericError("non-finite gradient; aborting epoch");
    auto step = [learning_rate](std::span<double> dst, std::span<const double> g) {
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] -= learning_rate * g[k];
    };
    // Check the result before committing so a blow-up leaves params intact.
    auto finite_after = [learning_rate](std::span<const double> dst, std::span<const double> g) {
        for (std::size_t k = 0; k < dst.size(); ++k)
            if (!std::isfinite(dst[k] - learning_rate * g[k])) return false;
        return true;
    };
    bool ok = finite_after(params.hidden_weights.data(), grads.weights.data()) &&
              finite_after(params.hidden_bias, grads.bias);
    for (std::size_t s = 0; ok && s < grads.attr.size(); ++s)
        ok = finite_after(params.attr_embedding.row(grads.attr.keys()[s]), grads.attr.row_at(s));
    for (std::size_t s = 0; ok && s < grads.nbr.size(); ++s)
        ok = finite_after(params.nbr_embedding.row(grads.nbr.keys()[s]), grads.nbr.row_at(s));
    if (!ok) throw NumericError("parameter update overflowed; aborting epoch");

    step(params.hidden_weights.data(), grads.weights.data());
    step(params.hidden_bias, grads.bias);
    for (std::size_t s = 0; s < grads.attr.size(); ++s)
        step(params.attr_embedding.row(grads.attr.keys()[s]), grads.attr.row_at(s));
    for (std::size_t s = 0; s < grads.nbr.size(); ++s)
        step(params.nbr_embedding.row(grads.nbr.keys()[s]), grads.nbr.row_at(s));
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

} // namespace

std::uint64_t parameter_seed(std::uint64_t seed) { return derive_seed(seed, 1); }
std::uint64_t sampler_seed(std::uint64_t seed) { return derive_seed(seed, 2); }

Trainer::Trainer(const AttributedGraph& g, TrainConfig cfg)
    : Trainer(g, cfg,
              (cfg.validate(),
               init_parameters(g.node_count(), g.attribute_count(), cfg.attr_dim, cfg.nbr_dim,
                               cfg.hidden, parameter_seed(cfg.seed)))) {}

Trainer::Trainer(const AttributedGraph& g, TrainConfig cfg, ModelParameters initial)
    : graph_(&g),
      cfg_(cfg),
      params_(std::move(initial)),
      sampler_(g),
      rng_(sampler_seed(cfg.seed)),
      grads_(params_),
      per_epoch_(cfg.triplets_per_epoch.value_or(g.edge_count() * cfg.batch_size)) {
    cfg_.validate();
    params_.check_shapes(g.node_count(), g.attribute_count());
}

EpochStats Trainer::run_epoch() { return run_epoch(per_epoch_); }

EpochStats Trainer::run_epoch(std::size_t triplets) {
    const auto start = std::chrono::steady_clock::now();
    EpochStats stats;
    stats.epoch = ++epochs_done_;
    TripletWorkspace ws;
    std::size_t remaining = triplets;
    while (remaining > 0) {
        const std::size_t b = std::min(cfg_.batch_size, remaining);
        remaining -= b;
        sampler_.sample_batch(b, rng_, batch_);
        for (const Triplet& t : batch_) {
            for (NodeId id : {t.u, t.i, t.j}) {
                digest_ = (digest_ ^ id) * 1099511628211ULL;
            }
        }
        grads_.clear();
        const double scale = cfg_.grad_agg == GradAggregation::mean ? 1.0 / static_cast<double>(b) : 1.0;
        for (const Triplet& t : batch_) {
            LossTerms l = accumulate_with(params_, *graph_, t, cfg_.lambda, cfg_.pooling, scale, grads_, ws);
            stats.loss.ranking += l.ranking;
            stats.loss.regularization += l.regularization;
        }
        apply_update(params_, grads_, cfg_.learning_rate);
        stats.triplets += b;
    }
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return stats;
}

namespace {
constexpr double kSaddleFraction = 0.99;
} // namespace

TrainResult train(const AttributedGraph& g, const TrainConfig& cfg, const EpochCallback& on_epoch) {
    Trainer trainer(g, cfg);
    TrainLog log;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        EpochStats stats = trainer.run_epoch();
        if (!std::isfinite(stats.loss.total())) throw NumericError("epoch loss is not finite");
        log.epochs.push_back(stats);
        if (on_epoch) on_epoch(stats);
        // At initialisation all scores are ~0, every triplet costs ~ln 2 and
        // the loss barely moves until SGD leaves that saddle; a flat curve
        // there is not convergence.
        const double per_triplet = stats.loss.ranking / static_cast<double>(std::max<std::size_t>(stats.triplets, 1));
        const bool at_saddle = per_triplet > kSaddleFraction * std::numbers::ln2;
        if (log.epochs.size() >= 2 && !at_saddle) {
            const double prev = log.epochs[log.epochs.size() - 2].loss.total();
            const double rel = std::abs(stats.loss.total() - prev) / std::max(std::abs(prev), 1e-300);
            if (rel < cfg.convergence_tol) {
                log.converged = true;
                break;
            }
        }
    }
    const std::uint64_t digest = trainer.triplet_digest();
    return {trainer.release(), std::move(log), digest};
}

} // namespace neural_brane
