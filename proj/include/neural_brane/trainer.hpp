#ifndef NEURAL_BRANE_TRAINER_HPP
#define NEURAL_BRANE_TRAINER_HPP

#include "neural_brane/model.hpp"
#include "neural_brane/sampler.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace neural_brane {

enum class GradAggregation { mean, sum };

GradAggregation parse_grad_aggregation(std::string_view name);

/// Hyperparameters. Defaults are the reference settings: d1 = d2 = 75,
/// h = 150, lr 0.5, lambda 5e-5, batch 100.
struct TrainConfig {
    std::size_t attr_dim = 75;
    std::size_t nbr_dim = 75;
    std::size_t hidden = 150;
    double learning_rate = 0.5;
    double lambda = 0.00005;
    std::size_t batch_size = 100;
    std::size_t epochs = 30;
    std::uint64_t seed = 42;
    Pooling pooling = Pooling::max;
    GradAggregation grad_agg = GradAggregation::mean;
    double convergence_tol = 1e-4;
    /// Triplets per epoch; defaults to edge_count * batch_size, i.e. one
    /// SGD step per undirected edge.
    std::optional<std::size_t> triplets_per_epoch;

    /// Throws InputError on a non-positive size, rate or epoch count.
    void validate() const;
};

/// Gradient rows keyed by row id, stored in first-touch order.
class SparseRowGradient {
public:
    explicit SparseRowGradient(std::size_t cols = 0) : cols_(cols) {}

    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return keys_.size(); }
    std::span<const std::uint32_t> keys() const noexcept { return keys_; }

    /// Zero-initialised on first access.
    std::span<double> row(std::uint32_t key);
    /// Empty span if the key was never touched.
    std::span<const double> find(std::uint32_t key) const;
    std::span<const double> row_at(std::size_t slot) const {
        return {values_.data() + slot * cols_, cols_};
    }

    void clear();

private:
    std::size_t cols_;
    std::vector<std::uint32_t> keys_;
    std::vector<double> values_;
    std::unordered_map<std::uint32_t, std::size_t> slot_;
};

/// Sparse row gradients for the two embedding tables and dense gradients
/// for the hidden layer.
struct GradientSet {
    SparseRowGradient attr;
    SparseRowGradient nbr;
    Matrix weights;
    std::vector<double> bias;

    GradientSet() = default;
    explicit GradientSet(const ModelParameters& params);

    void clear();
    bool all_finite() const;
};

struct LossTerms {
    double ranking = 0.0;        ///< -ln sigmoid(s_ui - s_uj)
    double regularization = 0.0; ///< lambda * squared norm of touched rows, W and b
    double total() const noexcept { return ranking + regularization; }
};

/// Loss of one triplet. The L2 term covers the distinct P rows and P' rows
/// read by the three forward passes plus all of W and b.
LossTerms triplet_loss_terms(const ModelParameters& params, const AttributedGraph& g,
                             const Triplet& t, double lambda, Pooling pooling = Pooling::max);

inline double triplet_loss(const ModelParameters& params, const AttributedGraph& g,
                           const Triplet& t, double lambda, Pooling pooling = Pooling::max) {
    return triplet_loss_terms(params, g, t, lambda, pooling).total();
}

/// Adds scale * dLoss/dTheta for one triplet into `grads` and returns the
/// triplet's loss.
LossTerms accumulate_triplet_gradients(const ModelParameters& params, const AttributedGraph& g,
                                       const Triplet& t, double lambda, Pooling pooling,
                                       double scale, GradientSet& grads);

GradientSet triplet_gradients(const ModelParameters& params, const AttributedGraph& g,
                              const Triplet& t, double lambda, Pooling pooling = Pooling::max);

/// Theta <- Theta - lr * grads. Throws NumericError, leaving params
/// untouched, if grads or the updated values are not finite.
void apply_update(ModelParameters& params, const GradientSet& grads, double learning_rate);

struct EpochStats {
    std::size_t epoch = 0;
    LossTerms loss;
    double seconds = 0.0;
    std::size_t triplets = 0;
};

struct TrainLog {
    std::vector<EpochStats> epochs;
    bool converged = false;
};

/// Mini-batch SGD over freshly sampled triplets. Each epoch draws
/// `triplets_per_epoch` triplets in batches; the loss recorded for a batch
/// is evaluated before that batch's update.
class Trainer {
public:
    Trainer(const AttributedGraph& g, TrainConfig cfg);
    Trainer(const AttributedGraph& g, TrainConfig cfg, ModelParameters initial);

    EpochStats run_epoch();
    EpochStats run_epoch(std::size_t triplets);

    const ModelParameters& params() const noexcept { return params_; }
    ModelParameters release() { return std::move(params_); }
    const TrainConfig& config() const noexcept { return cfg_; }
    std::size_t triplets_per_epoch() const noexcept { return per_epoch_; }
    const TripletSampler& sampler() const noexcept { return sampler_; }
    /// FNV-1a hash of every triplet drawn so far; two trainers that saw the
    /// same triplet stream report the same value.
    std::uint64_t triplet_digest() const noexcept { return digest_; }

private:
    const AttributedGraph* graph_;
    TrainConfig cfg_;
    ModelParameters params_;
    TripletSampler sampler_;
    Rng rng_;
    GradientSet grads_;
    std::vector<Triplet> batch_;
    std::size_t per_epoch_;
    std::size_t epochs_done_ = 0;
    std::uint64_t digest_ = 14695981039346656037ULL;
};

struct TrainResult {
    ModelParameters params;
    TrainLog log;
    std::uint64_t triplet_digest = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Runs epochs until cfg.epochs or until the relative change in total epoch
/// loss drops below cfg.convergence_tol. Epochs whose mean ranking loss is
/// still within 1% of ln 2 (all scores equal, i.e. not yet trained) never
/// count as converged.
TrainResult train(const AttributedGraph& g, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Seeds derived from cfg.seed for the two independent random streams.
std::uint64_t parameter_seed(std::uint64_t seed);
std::uint64_t sampler_seed(std::uint64_t seed);

} // namespace neural_brane

#endif // NEURAL_BRANE_TRAINER_HPP
