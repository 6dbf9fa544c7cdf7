#include "doctest.h"
#include "support.hpp"

#include "neural_brane/errors.hpp"
#include "neural_brane/model.hpp"

#include <cmath>
#include <numeric>

using namespace neural_brane;
using namespace nb_test;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

std::vector<double> column_max(const Matrix& table, const std::vector<std::uint32_t>& rows) {
    std::vector<double> out(table.cols(), -INFINITY);
    for (auto r : rows) {
        for (std::size_t k = 0; k < table.cols(); ++k) out[k] = std::max(out[k], table(r, k));
    }
    return out;
}

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

} // namespace

TEST_SUITE("model") {

TEST_CASE("initialisation is N(0, 0.01^2) and seed-determined") {
    const auto p = init_parameters(10, 1000, 100, 3, 4, 2718);
    const auto values = p.attr_embedding.data();
    REQUIRE(values.size() >= 100000);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / (values.size() - 1));
    CHECK(std::abs(mean) < 0.001);
    CHECK(sd == doctest::Approx(0.01).epsilon(0.1));

    CHECK(init_parameters(10, 1000, 100, 3, 4, 2718) == p);
    CHECK_FALSE(init_parameters(10, 1000, 100, 3, 4, 2719) == p);
}

TEST_CASE("dimension bookkeeping") {
    const auto p = init_parameters(5, 7, 75, 75, 150, 1);
    CHECK(p.dim() == 150);
    CHECK(p.attr_embedding.rows() == 7);
    CHECK(p.nbr_embedding.rows() == 5);
    CHECK(p.hidden_weights.rows() == 150);
    CHECK(p.hidden_weights.cols() == 150);
    CHECK(p.hidden_dim() == 150);
    CHECK_THROWS_AS(init_parameters(5, 7, 0, 75, 150, 1), InputError);
    CHECK_THROWS_AS(init_parameters(0, 7, 2, 2, 2, 1), InputError);
}

TEST_CASE("max pooling") {
    const Matrix table = from_rows({{1, 3}, {4, 2}});
    const std::vector<std::uint32_t> rows{0, 1};
    const auto pooled = pool_rows(table, rows, Pooling::max);
    CHECK(pooled.values == std::vector<double>{4, 3});
    CHECK(pooled.argmax == std::vector<std::uint32_t>{1, 0});

    SUBCASE("single row is returned unchanged") {
        const std::vector<std::uint32_t> one{1};
        CHECK(pool_rows(table, one, Pooling::max).values == std::vector<double>{4, 2});
    }
    SUBCASE("empty selection pools to zero") {
        const auto empty = pool_rows(table, {}, Pooling::max);
        CHECK(empty.values == std::vector<double>{0, 0});
        CHECK(empty.argmax.empty());
        CHECK(pool_rows(table, {}, Pooling::sum).values == std::vector<double>{0, 0});
    }
    SUBCASE("ties go to the earliest row") {
        const Matrix tied = from_rows({{1, 5}, {2, 5}, {2, 5}});
        const std::vector<std::uint32_t> sel{0, 1, 2};
        CHECK(pool_rows(tied, sel, Pooling::max).argmax == std::vector<std::uint32_t>{1, 0});
    }
    SUBCASE("sum pooling adds rows") {
        CHECK(pool_rows(table, rows, Pooling::sum).values == std::vector<double>{5, 5});
    }
}

TEST_CASE("pooling is order-free and monotone") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z;
    Matrix table(12, 6);
    for (double& v : table.data()) v = z(rng);
    std::vector<std::uint32_t> rows{0, 2, 3, 5, 8, 11};
    const auto ref = pool_rows(table, rows, Pooling::max).values;
    for (int k = 0; k < 200; ++k) {
        std::shuffle(rows.begin(), rows.end(), rng);
        CHECK(pool_rows(table, rows, Pooling::max).values == ref);
    }
    auto grown = rows;
    grown.push_back(7);
    const auto bigger = pool_rows(table, grown, Pooling::max).values;
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(bigger[k] >= ref[k]);
}

TEST_CASE("toy vertex b: attribute and neighbour encodings") {
    const auto g = toy_graph();
    const auto p = init_parameters(5, 7, 4, 3, 6, 9);
    const auto va = encode_attributes(p, g, b);
    CHECK(va.values == column_max(p.attr_embedding, {1, 5}));
    const auto vn = encode_neighbors(p, g, b);
    CHECK(vn.values == column_max(p.nbr_embedding, {a, c, d}));

    const auto trace = forward(p, g, b);
    CHECK(trace.attr_rows == std::vector<AttrId>{1, 5});
    CHECK(trace.nbr_rows == std::vector<NodeId>{a, c, d});
    CHECK(trace.f.size() == 7);
    std::vector<double> f = va.values;
    f.insert(f.end(), vn.values.begin(), vn.values.end());
    CHECK(trace.f == f);
    for (std::size_t k = 0; k < va.values.size(); ++k) {
        CHECK(p.attr_embedding(trace.attr_rows[trace.attr_argmax[k]], k) == va.values[k]);
    }
}

TEST_CASE("degree-one and isolated nodes") {
    GraphBuilder builder;
    builder.add_edge(0, 1);
    builder.add_edge(1, 2);
    builder.set_attributes(0, {0});
    const auto g = builder.build(4, 3);
    const auto p = init_parameters(4, 3, 2, 3, 5, 4);

    CHECK(encode_neighbors(p, g, 0).values == to_vec(p.nbr_embedding.row(1)));
    CHECK(encode_attributes(p, g, 0).values == to_vec(p.attr_embedding.row(0)));

    const auto iso = forward(p, g, 3);
    CHECK(iso.f == std::vector<double>(5, 0.0));
    CHECK(iso.nbr_argmax.empty());
    CHECK(iso.attr_argmax.empty());
    for (std::size_t k = 0; k < p.hidden_dim(); ++k) CHECK(iso.h[k] == std::max(0.0, p.hidden_bias[k]));
}

TEST_CASE("integrate concatenates, attribute half first") {
    const std::vector<double> x{1, 2}, y{3};
    CHECK(integrate(x, y, {2, 1}) == std::vector<double>{1, 2, 3});
    const std::vector<double> z2(2, 0.0), z3(3, 0.0);
    CHECK(integrate(z2, z3, {2, 3}) == std::vector<double>(5, 0.0));
    const auto f = integrate(x, y, {2, 1});
    CHECK(std::vector<double>(f.begin(), f.begin() + 2) == x);
    CHECK(std::vector<double>(f.begin() + 2, f.end()) == y);
    CHECK_THROWS_AS(integrate(x, y, {1, 2}), std::invalid_argument);
}

TEST_CASE("hidden layer") {
    SUBCASE("identity weights") {
        ModelParameters p;
        p.attr_embedding = Matrix(1, 1);
        p.nbr_embedding = Matrix(1, 1);
        p.hidden_weights = from_rows({{1, 0}, {0, 1}});
        p.hidden_bias = {0, 0};
        const std::vector<double> f{-1, 2};
        const auto out = hidden(p, f);
        CHECK(out.activation == std::vector<double>{0, 2});
        CHECK(out.pre_activation == std::vector<double>{-1, 2});
    }
    SUBCASE("zero input gives ReLU(b)") {
        auto p = init_parameters(3, 3, 2, 2, 7, 5);
        const auto out = hidden(p, std::vector<double>(4, 0.0));
        for (std::size_t k = 0; k < 7; ++k) CHECK(out.activation[k] == std::max(0.0, p.hidden_bias[k]));
    }
    SUBCASE("matches a naive loop") {
        std::mt19937_64 rng(31);
        std::normal_distribution<double> z;
        for (int trial = 0; trial < 20; ++trial) {
            auto p = init_parameters(3, 3, 9, 7, 13, rng());
            for (double& v : p.hidden_weights.data()) v = z(rng);
            for (double& v : p.hidden_bias) v = z(rng);
            std::vector<double> f(16);
            for (double& v : f) v = z(rng);
            const auto out = hidden(p, f);
            for (std::size_t r = 0; r < 13; ++r) {
                double acc = p.hidden_bias[r];
                for (std::size_t c = 0; c < 16; ++c) acc += p.hidden_weights(r, c) * f[c];
                CHECK(out.pre_activation[r] == doctest::Approx(acc).epsilon(1e-12));
                CHECK(out.activation[r] == (acc > 0 ? doctest::Approx(acc).epsilon(1e-12) : doctest::Approx(0.0)));
            }
        }
    }
}

TEST_CASE("forward is pure and ReLU-bounded") {
    std::mt19937_64 rng(41);
    const auto g = random_graph(rng, 15, 8, 0.3, 0.3);
    const auto p = init_parameters(15, 8, 3, 4, 6, 77);
    for (NodeId u = 0; u < 15; ++u) {
        const auto t1 = forward(p, g, u);
        const auto t2 = forward(p, g, u);
        CHECK(t1.h == t2.h);
        CHECK(t1.f == t2.f);
        for (double v : t1.h) CHECK(v >= 0.0);
    }
}

TEST_CASE("similarity") {
    const std::vector<double> x{1, 2}, y{3, 4}, zero{0, 0};
    CHECK(similarity(x, y) == 11.0);
    CHECK(similarity(x, zero) == 0.0);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    std::vector<double> u(9), v(9);
    for (double& w : u) w = z(rng);
    for (double& w : v) w = z(rng);
    CHECK(similarity(u, v) == similarity(v, u));
}

TEST_CASE("BPR probability and stable logistic helpers") {
    CHECK(bpr_probability(1.5, 1.5) == 0.5);
    CHECK(bpr_probability(std::log(3.0), 0.0) == doctest::Approx(0.75).epsilon(1e-15));
    const double tiny = bpr_probability(0.0, 50.0);
    CHECK(tiny > 0.0);
    CHECK(tiny < 2e-22);
    CHECK(std::isfinite(sigmoid(-700.0)));
    CHECK(sigmoid(700.0) == 1.0);
    CHECK(sigmoid(-800.0) >= 0.0);
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(softplus(800.0) == 800.0);
    CHECK(softplus(-800.0) >= 0.0);
    CHECK(softplus(-800.0) < 1e-300);
    // Shifting both scores leaves the ranking probability unchanged.
    CHECK(bpr_probability(3.0 + 100.0, 1.0 + 100.0) == doctest::Approx(bpr_probability(3.0, 1.0)).epsilon(1e-13));
}

TEST_CASE("pooling and layer names") {
    CHECK(parse_pooling("max") == Pooling::max);
    CHECK(parse_pooling("sum") == Pooling::sum);
    CHECK(to_string(Pooling::sum) == "sum");
    CHECK_THROWS_AS(parse_pooling("mean"), InputError);
    CHECK(parse_export_layer("f") == ExportLayer::features);
    CHECK(parse_export_layer("h") == ExportLayer::hidden);
    CHECK_THROWS_AS(parse_export_layer("x"), InputError);
}

TEST_CASE("embed_all") {
    // Nodes 3 and 4 share attributes and neighbourhood {0, 1}.
    GraphBuilder builder;
    builder.add_edge(0, 1);
    builder.add_edge(3, 0);
    builder.add_edge(3, 1);
    builder.add_edge(4, 0);
    builder.add_edge(4, 1);
    builder.add_edge(2, 1);
    builder.set_attributes(3, {1, 2});
    builder.set_attributes(4, {2, 1});
    builder.set_attributes(0, {0});
    const auto g = builder.build(5, 3);
    const auto p = init_parameters(5, 3, 4, 4, 8, 12);

    const auto table = embed_all(p, g);
    CHECK(table.node_count() == 5);
    CHECK(table.dim() == 8);
    CHECK(table.all_finite());
    CHECK(to_vec(table.vectors.row(3)) == to_vec(table.vectors.row(4)));
    CHECK(embed_all(p, g, Pooling::max, ExportLayer::features).dim() == 8);
    CHECK(embed_all(p, g, Pooling::max, ExportLayer::hidden, 3) == table);

    // With fresh parameters |h_k| <= max(0, b_k) + sum_j |W_kj| * max|f_j|.
    double f_max = 0.0;
    for (double v : p.attr_embedding.data()) f_max = std::max(f_max, std::abs(v));
    for (double v : p.nbr_embedding.data()) f_max = std::max(f_max, std::abs(v));
    for (std::size_t u = 0; u < 5; ++u) {
        for (std::size_t k = 0; k < 8; ++k) {
            double bound = std::max(0.0, p.hidden_bias[k]);
            for (std::size_t j = 0; j < 8; ++j) bound += std::abs(p.hidden_weights(k, j)) * f_max;
            CHECK(table.vectors(u, k) <= bound + 1e-15);
        }
    }
}

} // TEST_SUITE
