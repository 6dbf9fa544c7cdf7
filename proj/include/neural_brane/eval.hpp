#ifndef NEURAL_BRANE_EVAL_HPP
#define NEURAL_BRANE_EVAL_HPP

#include "neural_brane/graph.hpp"
#include "neural_brane/matrix.hpp"
#include "neural_brane/model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace neural_brane::eval {

/// Reads "<node-id> <class-id>" lines; nodes without a line are kUnlabeled.
std::vector<ClassId> read_labels(const std::filesystem::path& path, std::size_t node_count);

/// Maps arbitrary class ids of labeled nodes onto 0..k-1 (ascending order).
struct ClassIndex {
    std::vector<ClassId> classes;  ///< dense index -> original id
    std::vector<int> dense;        ///< per node; -1 if unlabeled
    std::size_t size() const noexcept { return classes.size(); }
};
ClassIndex index_classes(std::span<const ClassId> labels);

struct Split {
    std::vector<NodeId> train;
    std::vector<NodeId> test;
};

/// Uniform random split of the labeled nodes with round(ratio * count) in
/// train. Redrawn up to 10 times if a class is missing from train.
Split split_train_test(std::span<const ClassId> labels, double ratio, std::uint64_t seed);

struct LogisticOptions {
    double l2 = 1e-4;
    std::size_t iterations = 500;
    double learning_rate = 0.1;
};

/// Multinomial logistic regression; weights are k x (dim + 1) with the bias
/// in the last column.
struct LinearClassifier {
    Matrix weights;

    std::size_t classes() const noexcept { return weights.rows(); }
    int predict(std::span<const double> x) const;
    std::vector<int> predict(const Matrix& x) const;
};

/// Mean cross-entropy plus l2 * sum of squared non-bias weights.
double softmax_loss(const Matrix& weights, const Matrix& x, std::span<const int> y, double l2);
Matrix softmax_gradient(const Matrix& weights, const Matrix& x, std::span<const int> y, double l2);

/// Full-batch gradient descent. y holds dense class ids in [0, classes).
/// Throws InputError unless every class has an example and classes >= 2;
/// NumericError if the loss goes non-finite.
LinearClassifier train_linear_classifier(const Matrix& x, std::span<const int> y, std::size_t classes,
                                         const LogisticOptions& options = {});

/// Per-class F1 (0 for a class never predicted nor present).
std::vector<double> per_class_f1(std::span<const int> y_true, std::span<const int> y_pred, std::size_t classes);
double macro_f1(std::span<const int> y_true, std::span<const int> y_pred, std::size_t classes);

struct KMeansResult {
    std::vector<int> assignment;
    Matrix centroids;
    double wcss = 0.0;
    std::size_t iterations = 0;
};

inline constexpr std::size_t kKMeansMaxIterations = 300;

/// Within-cluster sum of squared distances to each cluster's mean.
double wcss(const Matrix& x, std::span<const int> assignment);

/// Lloyd's algorithm with k-means++ seeding; keeps the best of `restarts`
/// runs by WCSS. Empty clusters are re-seeded at the point farthest from
/// its centroid.
KMeansResult kmeans(const Matrix& x, std::size_t k, std::size_t restarts, std::uint64_t seed);

/// I(C;L) / sqrt(H(C) H(L)), natural logs, 0 when either entropy is 0.
double nmi(std::span<const int> assignment, std::span<const int> labels);
double purity(std::span<const int> assignment, std::span<const int> labels);

struct Projection2d {
    Matrix coords;                   ///< n x 2
    Matrix components;               ///< 2 x d, unit rows
    std::array<double, 2> variance{};  ///< variance along each component
};

/// Top-2 principal components by power iteration on the covariance matrix.
/// Each component's first nonzero loading is positive.
Projection2d project_2d(const Matrix& x);

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation; 0 for one run
};
Summary summarize(std::span<const double> values);

struct RatioResult {
    double ratio = 0.0;
    Summary macro_f1;
    std::vector<double> runs;
    std::vector<double> per_class_f1;  ///< averaged over runs
};

struct ClassificationReport {
    std::vector<RatioResult> ratios;
    std::size_t repeats = 0;
    std::size_t classes = 0;
};

/// For each ratio, `repeats` random splits (seeds seed, seed+1, ...).
ClassificationReport run_classification_eval(const EmbeddingTable& emb, std::span<const ClassId> labels,
                                             std::span<const double> ratios, std::size_t repeats,
                                             std::uint64_t seed, const LogisticOptions& options = {});

struct ClusteringReport {
    Summary nmi;
    Summary purity;
    std::size_t runs = 0;
    std::size_t clusters = 0;
};

/// k-means on the labeled rows with k = number of classes, repeated `runs`
/// times with seeds seed, seed+1, ...
ClusteringReport run_clustering_eval(const EmbeddingTable& emb, std::span<const ClassId> labels,
                                     std::size_t runs, std::size_t restarts, std::uint64_t seed);

} // namespace neural_brane::eval

#endif // NEURAL_BRANE_EVAL_HPP
