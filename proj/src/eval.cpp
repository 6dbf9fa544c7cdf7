#include "neural_brane/eval.hpp"

#include "neural_brane/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace neural_brane::eval {

std::vector<ClassId> read_labels(const std::filesystem::path& path, std::size_t node_count) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<ClassId> labels(node_count, kUnlabeled);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream row(line);
        std::string first;
        if (!(row >> first) || first.front() == '#') continue;
        long long u = 0, c = 0;
        std::istringstream id(first);
        std::string extra;
        if (!(id >> u) || !(row >> c) || (row >> extra))
            throw ParseError(path.string(), line_no, "expected '<node> <class>'");
        if (u < 0 || static_cast<std::size_t>(u) >= node_count)
            throw ParseError(path.string(), line_no, "node id outside embedding range");
        if (c < 0) throw ParseError(path.string(), line_no, "class ids must be non-negative");
        labels[static_cast<std::size_t>(u)] = static_cast<ClassId>(c);
    }
    return labels;
}

ClassIndex index_classes(std::span<const ClassId> labels) {
    ClassIndex idx;
    for (ClassId c : labels)
        if (c != kUnlabeled) idx.classes.push_back(c);
    std::sort(idx.classes.begin(), idx.classes.end());
    idx.classes.erase(std::unique(idx.classes.begin(), idx.classes.end()), idx.classes.end());
    idx.dense.assign(labels.size(), -1);
    for (std::size_t u = 0; u < labels.size(); ++u) {
        if (labels[u] == kUnlabeled) continue;
        auto it = std::lower_bound(idx.classes.begin(), idx.classes.end(), labels[u]);
        idx.dense[u] = static_cast<int>(it - idx.classes.begin());
    }
    return idx;
}

Split split_train_test(std::span<const ClassId> labels, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("train ratio must be in (0, 1)");
    std::vector<NodeId> labeled;
    for (std::size_t u = 0; u < labels.size(); ++u)
        if (labels[u] != kUnlabeled) labeled.push_back(static_cast<NodeId>(u));
    if (labeled.size() < 2) throw InputError("need at least 2 labeled nodes to split");
    const ClassIndex idx = index_classes(labels);

    const auto count = static_cast<std::ptrdiff_t>(labeled.size());
    auto n_train = static_cast<std::ptrdiff_t>(std::llround(ratio * static_cast<double>(count)));
    n_train = std::clamp<std::ptrdiff_t>(n_train, 1, count - 1);

    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 10; ++attempt) {
        std::vector<NodeId> order = labeled;
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<bool> present(idx.size(), false);
        for (std::ptrdiff_t k = 0; k < n_train; ++k) present[idx.dense[order[k]]] = true;
        if (std::find(present.begin(), present.end(), false) != present.end()) continue;
        Split s;
        s.train.assign(order.begin(), order.begin() + n_train);
        s.test.assign(order.begin() + n_train, order.end());
        return s;
    }
    throw InputError("could not draw a split with every class in the training set");
}

namespace {

/// Softmax probabilities for one augmented row, written into `p`.
void softmax_row(const Matrix& w, std::span<const double> x, std::vector<double>& p) {
    const std::size_t k = w.rows(), d = x.size();
    p.resize(k);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        auto wc = w.row(c);
        double z = wc[d];
        for (std::size_t j = 0; j < d; ++j) z += wc[j] * x[j];
        p[c] = z;
        top = std::max(top, z);
    }
    double total = 0.0;
    for (double& z : p) {
        z = std::exp(z - top);
        total += z;
    }
    for (double& z : p) z /= total;
}

void check_xy(const Matrix& weights, const Matrix& x, std::span<const int> y) {
    if (x.rows() != y.size()) throw std::invalid_argument("feature and label counts differ");
    if (weights.cols() != x.cols() + 1) throw std::invalid_argument("weights must be k x (dim + 1)");
}

} // namespace

double softmax_loss(const Matrix& weights, const Matrix& x, std::span<const int> y, double l2) {
    check_xy(weights, x, y);
    std::vector<double> p;
    double loss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        softmax_row(weights, x.row(r), p);
        loss -= std::log(std::max(p[y[r]], std::numeric_limits<double>::min()));
    }
    loss /= static_cast<double>(std::max<std::size_t>(x.rows(), 1));
    const std::size_t d = x.cols();
    for (std::size_t c = 0; c < weights.rows(); ++c)
        for (std::size_t j = 0; j < d; ++j) loss += l2 * weights(c, j) * weights(c, j);
    return loss;
}

Matrix softmax_gradient(const Matrix& weights, const Matrix& x, std::span<const int> y, double l2) {
    check_xy(weights, x, y);
    const std::size_t k = weights.rows(), d = x.cols();
    Matrix grad(k, d + 1);
    std::vector<double> p;
    const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(x.rows(), 1));
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto xr = x.row(r);
        softmax_row(weights, xr, p);
        for (std::size_t c = 0; c < k; ++c) {
            const double err = (p[c] - (static_cast<int>(c) == y[r] ? 1.0 : 0.0)) * inv_n;
            auto gc = grad.row(c);
            for (std::size_t j = 0; j < d; ++j) gc[j] += err * xr[j];
            gc[d] += err;
        }
    }
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < d; ++j) grad(c, j) += 2.0 * l2 * weights(c, j);
    return grad;
}

int LinearClassifier::predict(std::span<const double> x) const {
    const std::size_t d = x.size();
    int best = 0;
    double best_z = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < weights.rows(); ++c) {
        auto wc = weights.row(c);
        double z = wc[d];
        for (std::size_t j = 0; j < d; ++j) z += wc[j] * x[j];
        if (z > best_z) {
            best_z = z;
            best = static_cast<int>(c);
        }
    }
    return best;
}

std::vector<int> LinearClassifier::predict(const Matrix& x) const {
    std::vector<int> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
    return out;
}

LinearClassifier train_linear_classifier(const Matrix& x, std::span<const int> y, std::size_t classes,
                                         const LogisticOptions& options) {
    if (x.rows() != y.size()) throw InputError("feature and label counts differ");
    if (classes < 2) throw InputError("logistic regression needs at least 2 classes");
    std::vector<std::size_t> counts(classes, 0);
    for (int c : y) {
        if (c < 0 || static_cast<std::size_t>(c) >= classes) throw InputError("class id out of range");
        ++counts[static_cast<std::size_t>(c)];
    }
    if (std::find(counts.begin(), counts.end(), 0u) != counts.end())
        throw InputError("every class needs at least one training example");

    LinearClassifier clf{Matrix(classes, x.cols() + 1)};
    for (std::size_t it = 0; it < options.iterations; ++it) {
        Matrix g = softmax_gradient(clf.weights, x, y, options.l2);
        auto w = clf.weights.data();
        auto gd = g.data();
        for (std::size_t k = 0; k < w.size(); ++k) w[k] -= options.learning_rate * gd[k];
    }
    if (!std::isfinite(softmax_loss(clf.weights, x, y, options.l2)))
        throw NumericError("logistic regression loss is not finite");
    return clf;
}

std::vector<double> per_class_f1(std::span<const int> y_true, std::span<const int> y_pred, std::size_t classes) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw std::invalid_argument("macro_f1 needs equal, nonempty label vectors");
    std::vector<double> tp(classes, 0), fp(classes, 0), fn(classes, 0);
    for (std::size_t r = 0; r < y_true.size(); ++r) {
        const int t = y_true[r], p = y_pred[r];
        if (t == p) {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn[t] += 1;
        }
    }
    std::vector<double> f1(classes, 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
        const double denom = 2 * tp[c] + fp[c] + fn[c];
        f1[c] = denom > 0 ? 2 * tp[c] / denom : 0.0;
    }
    return f1;
}

double macro_f1(std::span<const int> y_true, std::span<const int> y_pred, std::size_t classes) {
    auto f1 = per_class_f1(y_true, y_pred, classes);
    return std::accumulate(f1.begin(), f1.end(), 0.0) / static_cast<double>(classes);
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

Matrix cluster_means(const Matrix& x, std::span<const int> assignment, std::size_t k,
                     std::vector<std::size_t>& sizes) {
    Matrix c(k, x.cols());
    sizes.assign(k, 0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto dst = c.row(static_cast<std::size_t>(assignment[r]));
        auto src = x.row(r);
        for (std::size_t j = 0; j < x.cols(); ++j) dst[j] += src[j];
        ++sizes[static_cast<std::size_t>(assignment[r])];
    }
    for (std::size_t q = 0; q < k; ++q)
        if (sizes[q] > 0)
            for (double& v : c.row(q)) v /= static_cast<double>(sizes[q]);
    return c;
}

KMeansResult lloyd(const Matrix& x, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = x.rows();
    KMeansResult res;
    res.centroids = Matrix(k, x.cols());

    // k-means++ seeding
    std::uniform_int_distribution<std::size_t> uni(0, n - 1);
    auto first = x.row(uni(rng));
    std::copy(first.begin(), first.end(), res.centroids.row(0).begin());
    std::vector<double> d2(n);
    for (std::size_t r = 0; r < n; ++r) d2[r] = sq_dist(x.row(r), res.centroids.row(0));
    for (std::size_t q = 1; q < k; ++q) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng), acc = 0.0;
            pick = n - 1;
            for (std::size_t r = 0; r < n; ++r) {
                acc += d2[r];
                if (acc > target && d2[r] > 0.0) {
                    pick = r;
                    break;
                }
            }
        } else {
            pick = uni(rng);
        }
        auto src = x.row(pick);
        std::copy(src.begin(), src.end(), res.centroids.row(q).begin());
        for (std::size_t r = 0; r < n; ++r) d2[r] = std::min(d2[r], sq_dist(x.row(r), res.centroids.row(q)));
    }

    res.assignment.assign(n, -1);
    std::vector<std::size_t> sizes;
    for (res.iterations = 0; res.iterations < kKMeansMaxIterations; ++res.iterations) {
        bool changed = false;
        for (std::size_t r = 0; r < n; ++r) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t q = 0; q < k; ++q) {
                const double dq = sq_dist(x.row(r), res.centroids.row(q));
                if (dq < best_d) {
                    best_d = dq;
                    best = static_cast<int>(q);
                }
            }
            if (res.assignment[r] != best) {
                res.assignment[r] = best;
                changed = true;
            }
        }
        Matrix means = cluster_means(x, res.assignment, k, sizes);
        // Re-seed empty clusters at the point farthest from its own centroid.
        for (std::size_t q = 0; q < k; ++q) {
            if (sizes[q] > 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t r = 0; r < n; ++r) {
                const auto owner = static_cast<std::size_t>(res.assignment[r]);
                if (sizes[owner] <= 1) continue;
                const double dr = sq_dist(x.row(r), means.row(owner));
                if (dr > far_d) {
                    far_d = dr;
                    far = r;
                }
            }
            if (far == n) break;
            --sizes[static_cast<std::size_t>(res.assignment[far])];
            res.assignment[far] = static_cast<int>(q);
            sizes[q] = 1;
            changed = true;
            means = cluster_means(x, res.assignment, k, sizes);
        }
        res.centroids = std::move(means);
        if (!changed) break;
    }
    res.wcss = wcss(x, res.assignment);
    return res;
}

} // namespace

double wcss(const Matrix& x, std::span<const int> assignment) {
    if (assignment.size() != x.rows()) throw std::invalid_argument("wcss: size mismatch");
    int k = 0;
    for (int a : assignment) k = std::max(k, a + 1);
    std::vector<std::size_t> sizes;
    Matrix means = cluster_means(x, assignment, static_cast<std::size_t>(k), sizes);
    double s = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r)
        s += sq_dist(x.row(r), means.row(static_cast<std::size_t>(assignment[r])));
    return s;
}

KMeansResult kmeans(const Matrix& x, std::size_t k, std::size_t restarts, std::uint64_t seed) {
    if (k == 0 || k > x.rows()) throw InputError("k-means needs 1 <= k <= number of rows");
    std::mt19937_64 rng(seed);
    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        KMeansResult run = lloyd(x, k, rng);
        if (run.wcss < best.wcss) best = std::move(run);
    }
    return best;
}

namespace {

struct Contingency {
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> rows, cols;
    double n = 0.0;
};

Contingency contingency(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw std::invalid_argument("clustering metrics need equal lengths");
    Contingency t;
    for (std::size_t r = 0; r < a.size(); ++r) {
        t.joint[{a[r], b[r]}] += 1;
        t.rows[a[r]] += 1;
        t.cols[b[r]] += 1;
    }
    t.n = static_cast<double>(a.size());
    return t;
}

double entropy(const std::map<int, double>& counts, double n) {
    double h = 0.0;
    for (auto& [key, c] : counts) {
        const double p = c / n;
        h -= p * std::log(p);
    }
    return h;
}

} // namespace

double nmi(std::span<const int> assignment, std::span<const int> labels) {
    if (assignment.empty()) return 0.0;
    Contingency t = contingency(assignment, labels);
    const double hc = entropy(t.rows, t.n), hl = entropy(t.cols, t.n);
    if (hc <= 0.0 || hl <= 0.0) return 0.0;
    double mi = 0.0;
    for (auto& [key, c] : t.joint)
        mi += (c / t.n) * std::log(c * t.n / (t.rows[key.first] * t.cols[key.second]));
    return std::clamp(mi / std::sqrt(hc * hl), 0.0, 1.0);
}

double purity(std::span<const int> assignment, std::span<const int> labels) {
    if (assignment.empty()) return 0.0;
    Contingency t = contingency(assignment, labels);
    std::map<int, double> best;
    for (auto& [key, c] : t.joint) best[key.first] = std::max(best[key.first], c);
    double s = 0.0;
    for (auto& [cluster, c] : best) s += c;
    return s / t.n;
}

namespace {

constexpr double kPowerTol = 1e-9;
constexpr int kPowerMaxIter = 100000;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

void fix_sign(std::span<double> v) {
    for (double x : v) {
        if (std::abs(x) > 1e-12) {
            if (x < 0)
                for (double& y : v) y = -y;
            return;
        }
    }
}

/// Gram-Schmidt on the two basis vectors stored as rows of `v`. A vector
/// whose remainder is below `floor` is zeroed; survivors are packed to the
/// front. Returns how many survived.
int orthonormalize(Matrix& v, double floor) {
    auto a = v.row(0), b = v.row(1);
    auto normalize = [floor](std::span<double> x) {
        const double nrm = std::sqrt(dot(x, x));
        if (nrm <= floor) {
            std::fill(x.begin(), x.end(), 0.0);
            return false;
        }
        for (double& y : x) y /= nrm;
        return true;
    };
    if (!normalize(a)) {
        std::swap_ranges(a.begin(), a.end(), b.begin());
        return normalize(a) ? 1 : 0;
    }
    const double p = dot(a, b);
    for (std::size_t k = 0; k < b.size(); ++k) b[k] -= p * a[k];
    return normalize(b) ? 2 : 1;
}

/// Top-2 eigenpairs of a symmetric PSD matrix by subspace (block power)
/// iteration with a 2x2 Rayleigh-Ritz step. Rows of the returned matrix are
/// the eigenvectors; missing directions are zero rows with eigenvalue 0.
std::pair<std::array<double, 2>, Matrix> top2_eigen(const Matrix& c) {
    const std::size_t d = c.rows();
    double scale = 0.0;
    for (std::size_t k = 0; k < d; ++k) scale = std::max(scale, std::abs(c(k, k)));
    Matrix v(2, d);
    if (scale == 0.0) return {{0.0, 0.0}, v};

    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    for (double& x : v.data()) x = gauss(rng);
    int rank = orthonormalize(v, 0.0);

    const double floor = 1e-12 * scale;
    Matrix z(2, d), u(2, d);
    std::array<double, 2> lambda{0.0, 0.0};
    for (int it = 0; it < kPowerMaxIter; ++it) {
        for (std::size_t col = 0; col < 2; ++col) {
            auto vc = v.row(col);
            auto zc = z.row(col);
            for (std::size_t r = 0; r < d; ++r) zc[r] = dot(c.row(r), vc);
        }
        // Rayleigh-Ritz on span(v).
        const double h00 = dot(v.row(0), z.row(0));
        const double h01 = rank == 2 ? dot(v.row(0), z.row(1)) : 0.0;
        const double h11 = rank == 2 ? dot(v.row(1), z.row(1)) : 0.0;
        const double mid = 0.5 * (h00 + h11);
        const double rad = std::hypot(0.5 * (h00 - h11), h01);
        lambda = {mid + rad, rank == 2 ? mid - rad : 0.0};
        double q[2][2];
        if (std::abs(h01) > 0.0) {
            double x = lambda[0] - h11, y = h01, nq = std::hypot(x, y);
            q[0][0] = x / nq;
            q[1][0] = y / nq;
        } else if (h00 >= h11) {
            q[0][0] = 1.0;
            q[1][0] = 0.0;
        } else {
            q[0][0] = 0.0;
            q[1][0] = 1.0;
        }
        q[0][1] = -q[1][0];
        q[1][1] = q[0][0];

        double residual = 0.0;
        for (std::size_t e = 0; e < static_cast<std::size_t>(rank); ++e) {
            auto ue = u.row(e);
            for (std::size_t k = 0; k < d; ++k) {
                ue[k] = v(0, k) * q[0][e] + (rank == 2 ? v(1, k) * q[1][e] : 0.0);
                const double cu = z(0, k) * q[0][e] + (rank == 2 ? z(1, k) * q[1][e] : 0.0);
                residual = std::max(residual, std::abs(cu - lambda[e] * ue[k]));
            }
        }
        if (residual <= kPowerTol * scale) break;

        v = z;
        rank = orthonormalize(v, floor);
        if (rank == 0) return {{0.0, 0.0}, Matrix(2, d)};
    }
    if (rank < 2) {
        std::fill(u.row(1).begin(), u.row(1).end(), 0.0);
        lambda[1] = 0.0;
    }
    if (lambda[1] <= floor) {
        std::fill(u.row(1).begin(), u.row(1).end(), 0.0);
        lambda[1] = 0.0;
    }
    fix_sign(u.row(0));
    fix_sign(u.row(1));
    return {lambda, u};
}

} // namespace

Projection2d project_2d(const Matrix& x) {
    const std::size_t n = x.rows(), d = x.cols();
    if (d < 2) throw InputError("2D projection needs at least 2 dimensions");
    if (n == 0) throw InputError("2D projection needs at least one row");

    std::vector<double> mean(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < d; ++k) mean[k] += x(r, k);
    for (double& m : mean) m /= static_cast<double>(n);

    Matrix cov(d, d);
    for (std::size_t r = 0; r < n; ++r) {
        auto xr = x.row(r);
        for (std::size_t a = 0; a < d; ++a) {
            const double da = xr[a] - mean[a];
            if (da == 0.0) continue;
            auto ca = cov.row(a);
            for (std::size_t b = 0; b < d; ++b) ca[b] += da * (xr[b] - mean[b]);
        }
    }
    for (double& v : cov.data()) v /= static_cast<double>(n);

    auto [lambda, comps] = top2_eigen(cov);

    Projection2d out;
    out.components = comps;
    out.variance = lambda;
    out.coords = Matrix(n, 2);
    for (std::size_t r = 0; r < n; ++r) {
        double p1 = 0.0, p2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double c = x(r, k) - mean[k];
            p1 += c * comps(0, k);
            p2 += c * comps(1, k);
        }
        out.coords(r, 0) = p1;
        out.coords(r, 1) = p2;
    }
    return out;
}

Summary summarize(std::span<const double> values) {
    Summary s;
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

namespace {

Matrix gather_rows(const Matrix& x, std::span<const NodeId> ids) {
    Matrix out(ids.size(), x.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        auto src = x.row(ids[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

void check_table(const EmbeddingTable& emb, std::span<const ClassId> labels) {
    if (emb.node_count() != labels.size())
        throw InputError("embedding has " + std::to_string(emb.node_count()) + " rows but labels cover " +
                         std::to_string(labels.size()) + " nodes");
    if (!emb.all_finite()) throw NumericError("embedding contains non-finite values");
}

} // namespace

ClassificationReport run_classification_eval(const EmbeddingTable& emb, std::span<const ClassId> labels,
                                             std::span<const double> ratios, std::size_t repeats,
                                             std::uint64_t seed, const LogisticOptions& options) {
    check_table(emb, labels);
    const ClassIndex idx = index_classes(labels);
    if (idx.size() < 2) throw InputError("classification needs at least 2 classes");
    ClassificationReport report;
    report.repeats = repeats;
    report.classes = idx.size();
    for (double ratio : ratios) {
        RatioResult rr;
        rr.ratio = ratio;
        rr.per_class_f1.assign(idx.size(), 0.0);
        for (std::size_t r = 0; r < repeats; ++r) {
            Split split = split_train_test(labels, ratio, seed + r);
            std::vector<int> y_train, y_test;
            for (NodeId u : split.train) y_train.push_back(idx.dense[u]);
            for (NodeId u : split.test) y_test.push_back(idx.dense[u]);
            LinearClassifier clf =
                train_linear_classifier(gather_rows(emb.vectors, split.train), y_train, idx.size(), options);
            std::vector<int> pred = clf.predict(gather_rows(emb.vectors, split.test));
            auto f1 = per_class_f1(y_test, pred, idx.size());
            for (std::size_t c = 0; c < f1.size(); ++c) rr.per_class_f1[c] += f1[c] / static_cast<double>(repeats);
            rr.runs.push_back(std::accumulate(f1.begin(), f1.end(), 0.0) / static_cast<double>(idx.size()));
        }
        rr.macro_f1 = summarize(rr.runs);
        report.ratios.push_back(std::move(rr));
    }
    return report;
}

ClusteringReport run_clustering_eval(const EmbeddingTable& emb, std::span<const ClassId> labels,
                                     std::size_t runs, std::size_t restarts, std::uint64_t seed) {
    check_table(emb, labels);
    const ClassIndex idx = index_classes(labels);
    std::vector<NodeId> labeled;
    std::vector<int> truth;
    for (std::size_t u = 0; u < labels.size(); ++u) {
        if (labels[u] == kUnlabeled) continue;
        labeled.push_back(static_cast<NodeId>(u));
        truth.push_back(idx.dense[u]);
    }
    if (labeled.empty()) throw InputError("clustering evaluation needs labeled nodes");
    Matrix x = gather_rows(emb.vectors, labeled);

    ClusteringReport report;
    report.runs = runs;
    report.clusters = idx.size();
    std::vector<double> nmis, purities;
    for (std::size_t r = 0; r < runs; ++r) {
        KMeansResult km = kmeans(x, idx.size(), restarts, seed + r);
        nmis.push_back(nmi(km.assignment, truth));
        purities.push_back(purity(km.assignment, truth));
    }
    report.nmi = summarize(nmis);
    report.purity = summarize(purities);
    return report;
}

} // namespace neural_brane::eval
