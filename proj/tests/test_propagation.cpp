#include <doctest.h>

#include "support.hpp"
#include "zsl/error.hpp"
#include "zsl/pipeline.hpp"
#include "zsl/propagation.hpp"

using namespace zsl;

namespace {

PropagationOperator path_operator() {
    AffinityGraph g;
    g.n = 3;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
    return propagation_operator(g);
}

PropagateOptions tight(double alpha) {
    PropagateOptions o;
    o.alpha = alpha;
    o.tol = 1e-12;
    o.max_iter = 100000;
    return o;
}

// Evidence and weights computed from dense closed-form propagations.
std::vector<double> bma_weight_oracle(const std::vector<PropagationOperator>& ops, const SeedMatrix& seeds,
                                      double alpha) {
    std::vector<double> evidence;
    for (const auto& op : ops) {
        const Matrix s = op.dense();
        const Matrix g = alpha * s * test::closed_form_propagation(s, seeds.y0, alpha);
        double e = 1.0;
        for (auto [row, cls] : seeds.seeds) {
            const double total = g.row(row).sum();
            e *= total > 0 ? g(row, cls) / total : 0.0;
        }
        evidence.push_back(e);
    }
    double sum = 0.0;
    for (double e : evidence) sum += e;
    for (double& e : evidence) e = sum > 0 ? e / sum : 1.0 / double(evidence.size());
    return evidence;
}

}  // namespace

TEST_CASE("seed matrix") {
    const SeedMatrix y(4, 2, {{2, 0}, {3, 1}});
    CHECK(y.y0(2, 0) == 1.0);
    CHECK(y.y0(3, 1) == 1.0);
    CHECK(y.y0.sum() == 2.0);
    CHECK_THROWS_AS(SeedMatrix(4, 2, {{2, 0}, {2, 1}}), InvalidParameter);
    CHECK_THROWS_AS(SeedMatrix(4, 2, {{4, 0}}), InvalidParameter);
    CHECK_THROWS_AS(SeedMatrix(4, 2, {{1, 2}}), InvalidParameter);
}

TEST_CASE("alpha zero returns the seeds") {
    const SeedMatrix y(3, 2, {{0, 0}, {2, 1}});
    PropagateOptions o;
    o.alpha = 0.0;
    const auto f = propagate(path_operator(), y, o);
    CHECK(f.f == y.y0);
    CHECK(f.converged);
}

TEST_CASE("path graph matches the closed form") {
    const SeedMatrix y(3, 1, {{0, 0}});
    const auto op = path_operator();
    const auto f = propagate(op, y, tight(0.5));
    CHECK(f.converged);
    const Matrix oracle = test::closed_form_propagation(op.dense(), y.y0, 0.5);
    CHECK((f.f - oracle).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("random operators match the closed form") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Index n = 40 + Index(seed) * 20;
        const Matrix x = test::random_matrix(n, 3, seed);
        const std::vector<PropagationOperator> ops = {propagation_operator(knn_graph(x, 5)),
                                                      propagation_operator(hypergraph_homogeneous(x, 4))};
        const SeedMatrix y(n, 3, {{0, 0}, {1, 1}, {2, 2}});
        for (const auto& op : ops)
            for (double alpha : {0.5, 0.85, 0.9}) {
                const auto f = propagate(op, y, tight(alpha));
                CHECK(f.converged);
                CHECK((f.f - test::closed_form_propagation(op.dense(), y.y0, alpha)).cwiseAbs().maxCoeff() < 1e-8);
            }
    }
}

TEST_CASE("disconnected components keep their own prototype class") {
    Matrix x(8, 1);
    x << 0, 0.1, 0.2, 0.3, 50, 50.1, 50.2, 50.3;
    const auto op = propagation_operator(knn_graph(x, 2, 1.0));
    const SeedMatrix y(8, 2, {{0, 0}, {7, 1}});
    const auto f = propagate(op, y);
    const auto arg = f.argmax();
    for (Index i = 0; i < 4; ++i) CHECK(arg[std::size_t(i)] == 0);
    for (Index i = 4; i < 8; ++i) CHECK(arg[std::size_t(i)] == 1);
}

TEST_CASE("scaling the seeds scales the scores") {
    const Matrix x = test::random_matrix(30, 2, 9);
    const auto op = propagation_operator(knn_graph(x, 4));
    SeedMatrix y(30, 3, {{0, 0}, {1, 1}, {2, 2}});
    const auto base = propagate(op, y, tight(0.85));
    y.y0 *= 3.5;
    const auto scaled = propagate(op, y, tight(0.85));
    CHECK((scaled.f - 3.5 * base.f).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(scaled.argmax() == base.argmax());
}

TEST_CASE("propagation options are checked and non-convergence is reported") {
    const SeedMatrix y(3, 1, {{0, 0}});
    PropagateOptions o;
    o.alpha = 1.0;
    CHECK_THROWS_AS(propagate(path_operator(), y, o), InvalidParameter);
    o.alpha = -0.1;
    CHECK_THROWS_AS(propagate(path_operator(), y, o), InvalidParameter);
    o.alpha = 0.9;
    o.max_iter = 2;
    o.tol = 1e-15;
    const auto f = propagate(path_operator(), y, o);
    CHECK_FALSE(f.converged);
    CHECK(f.iterations == 2);
    CHECK(f.f.allFinite());
    CHECK_THROWS_AS(propagate(path_operator(), SeedMatrix(4, 1, {{0, 0}})), ShapeError);
}

TEST_CASE("argmax ties go to the lowest class") {
    LabelScores s;
    s.f = Matrix::Zero(2, 3);
    s.f(1, 1) = s.f(1, 2) = 0.5;
    s.class_names = {"a", "b", "c"};
    CHECK(s.argmax() == std::vector<Index>{0, 1});
    CHECK(s.predicted_names() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("single-graph model averaging equals propagation") {
    const Matrix x = test::random_matrix(25, 2, 12);
    const auto op = propagation_operator(knn_graph(x, 3));
    const SeedMatrix y(25, 2, {{0, 0}, {1, 1}});
    const auto plain = propagate(op, y);
    const auto one = bma_combine({op}, y);
    REQUIRE(one.graph_weights.size() == 1);
    CHECK(one.graph_weights[0] == 1.0);
    CHECK(one.f == plain.f);

    const auto twice = bma_combine({op, op}, y);
    CHECK((twice.f - plain.f).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(twice.graph_weights[0] == doctest::Approx(0.5));
}

TEST_CASE("model averaging weights") {
    const Matrix x = test::random_matrix(30, 3, 13);
    const std::vector<PropagationOperator> ops = {propagation_operator(knn_graph(x, 3)),
                                                  propagation_operator(knn_graph(x, 8)),
                                                  propagation_operator(hypergraph_homogeneous(x, 5))};
    const SeedMatrix y(30, 3, {{0, 0}, {1, 1}, {2, 2}});
    const auto options = tight(0.85);
    const auto combined = bma_combine(ops, y, options);
    const auto oracle = bma_weight_oracle(ops, y, 0.85);
    double sum = 0.0;
    for (std::size_t g = 0; g < ops.size(); ++g) {
        CHECK(combined.graph_weights[g] >= 0.0);
        CHECK(combined.graph_weights[g] <= 1.0);
        CHECK(combined.graph_weights[g] == doctest::Approx(oracle[g]).epsilon(1e-8));
        sum += combined.graph_weights[g];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

    Matrix expected = Matrix::Zero(30, 3);
    for (std::size_t g = 0; g < ops.size(); ++g)
        expected += oracle[g] * test::closed_form_propagation(ops[g].dense(), y.y0, 0.85);
    CHECK((combined.f - expected).cwiseAbs().maxCoeff() < 1e-8);

    // Order of the graphs does not matter.
    const auto reversed = bma_combine({ops[2], ops[1], ops[0]}, y, options);
    CHECK((reversed.f - combined.f).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(reversed.graph_weights[0] == doctest::Approx(combined.graph_weights[2]));
}

TEST_CASE("a graph that isolates the prototypes carries no weight") {
    // 8 data rows then 2 prototypes.
    const Matrix x = test::random_matrix(10, 2, 14);
    const auto informative = knn_graph(x, 3);
    AffinityGraph isolating = informative;
    std::erase_if(isolating.edges, [](const WeightedEdge& e) { return e.i >= 8 || e.j >= 8; });
    const SeedMatrix y(10, 2, {{8, 0}, {9, 1}});
    const auto good = propagation_operator(informative);
    const auto bad = propagation_operator(isolating);

    const auto combined = bma_combine({bad, good}, y);
    CHECK(combined.graph_weights[0] == 0.0);
    CHECK(combined.graph_weights[1] == 1.0);
    CHECK(combined.argmax() == propagate(good, y).argmax());

    const auto hopeless = bma_combine({bad, bad}, y);
    CHECK(hopeless.graph_weights == std::vector<double>{0.5, 0.5});
    CHECK_FALSE(hopeless.warnings.empty());

    CHECK_THROWS_AS(bma_combine({}, y), InvalidParameter);
}

TEST_CASE("one-view hypergraph propagation") {
    const Matrix x = test::random_matrix(20, 2, 15);
    std::vector<Prototype> items = {{{"a"}, x.row(0).transpose()}, {{"b"}, x.row(1).transpose()}};
    const PrototypeSet protos(items);
    TmvHlpOptions o;
    o.k = 4;
    const auto r = tmv_hlp({FeatureMatrix(x)}, {protos}, o);
    CHECK(r.f.rows() == 20);
    CHECK(r.class_names == std::vector<std::string>{"a", "b"});

    Matrix all(22, 2);
    all << x, protos.matrix();
    const auto op = propagation_operator(hypergraph_homogeneous(all, 4));
    const auto direct = propagate(op, SeedMatrix(22, 2, {{20, 0}, {21, 1}}));
    CHECK(r.f == direct.f.topRows(20));
}

TEST_CASE("tmv_hlp input checks") {
    const Matrix x = test::random_matrix(10, 2, 16);
    std::vector<Prototype> items = {{{"a"}, Vector::Zero(2)}};
    const PrototypeSet protos(items);
    CHECK_THROWS_AS(tmv_hlp({FeatureMatrix(x)}, {protos, protos}), ShapeError);
    CHECK_THROWS_AS(tmv_hlp({FeatureMatrix(x), FeatureMatrix(test::random_matrix(9, 2, 1))}, {protos, protos}),
                    ShapeError);
}

TEST_CASE("score csv has a header of class names") {
    LabelScores s;
    s.f = Matrix::Identity(2, 2);
    s.class_names = {"x", "y|z"};
    CHECK(format_scores_csv(s) == "x,y|z\n1,0\n0,1\n");
}

TEST_CASE("hypergraph propagation is exact on an unshifted benchmark") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SynthParams p;
        p.seed = seed;
        const auto b = synth_benchmark(p);
        const auto r = run_zsl(b.aux_features, {b.aux_semantics}, b.target_features, {b.target_prototypes});
        CHECK(r.predictions == b.target_true_labels);
        for (double w : r.scores.graph_weights) {
            CHECK(w >= 0.0);
            CHECK(w <= 1.0);
        }
    }
}
