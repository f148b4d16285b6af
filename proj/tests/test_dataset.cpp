#include <doctest.h>

#include <set>

#include "support.hpp"
#include "zsl/dataset.hpp"
#include "zsl/error.hpp"
#include "zsl/projection.hpp"

using namespace zsl;

TEST_CASE("matrix text parses into rows and columns") {
    SUBCASE("identity") {
        const auto m = parse_matrix("1,0\n0,1\n");
        CHECK(m.values() == Matrix::Identity(2, 2));
    }
    SUBCASE("single row") {
        const auto m = parse_matrix("1,2,3\n");
        REQUIRE(m.rows() == 1);
        REQUIRE(m.cols() == 3);
        CHECK(m.values()(0, 2) == 3.0);
    }
    SUBCASE("comments, blank lines and a missing final newline") {
        const auto m = parse_matrix("# header\n1.5, -2\n\n3e2,4");
        CHECK(m.rows() == 2);
        CHECK(m.values()(1, 0) == 300.0);
        CHECK(m.values()(0, 1) == -2.0);
    }
}

TEST_CASE("matrix parse errors") {
    CHECK_THROWS_AS(parse_matrix("1,2\n3\n"), FormatError);
    CHECK_THROWS_AS(parse_matrix("1,x\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("1,nan\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("1,inf\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix(""), EmptyInputError);
    CHECK_THROWS_AS(parse_matrix("# only a comment\n\n"), EmptyInputError);
}

TEST_CASE("feature matrix rejects empty or non-finite data") {
    CHECK_THROWS_AS(FeatureMatrix{Matrix(0, 3)}, EmptyInputError);
    Matrix bad = Matrix::Ones(2, 2);
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(FeatureMatrix{bad}, InvalidInput);
}

TEST_CASE("matrix write then load is bit-identical") {
    test::TempDir dir("matrix");
    const Matrix m = test::random_matrix(10, 5, 42) * 1e3;
    write_matrix(dir / "m.csv", m);
    const auto back = load_matrix(dir / "m.csv", "view");
    CHECK(back.view_name() == "view");
    CHECK(back.values() == m);

    Matrix awkward(1, 4);
    awkward << 0.1, -1e-300, 5e-324, 1.7976931348623157e308;
    CHECK(parse_matrix(format_matrix(awkward)).values() == awkward);
}

TEST_CASE("load_matrix on a missing file") {
    CHECK_THROWS_AS(load_matrix("/nonexistent/zsl/matrix.csv"), InvalidInput);
}

TEST_CASE("word vectors") {
    SUBCASE("two tokens") {
        const auto wv = parse_word_vectors("cat 1 0\ndog 0 1\n");
        CHECK(wv.dim == 2);
        CHECK(wv.entries.size() == 2);
        REQUIRE(wv.find("dog") != nullptr);
        CHECK((*wv.find("dog"))(1) == 1.0);
        CHECK(wv.warnings.empty());
    }
    SUBCASE("duplicate token keeps the last vector") {
        const auto wv = parse_word_vectors("a 1\na 2\n");
        CHECK(wv.dim == 1);
        CHECK(wv.entries.size() == 1);
        CHECK((*wv.find("a"))(0) == 2.0);
        CHECK(wv.warnings.size() == 1);
    }
    SUBCASE("inconsistent dimension") {
        CHECK_THROWS_AS(parse_word_vectors("a 1 2\nb 3\n"), FormatError);
    }
    SUBCASE("no lines") {
        CHECK_THROWS_AS(parse_word_vectors(""), EmptyInputError);
    }
    SUBCASE("bad number") {
        CHECK_THROWS_AS(parse_word_vectors("a 1 zz\n"), ParseError);
    }
}

TEST_CASE("vocabularies") {
    const LabelVocabulary aux({"a", "b"}, LabelVocabulary::Role::auxiliary);
    const LabelVocabulary target({"c", "d"}, LabelVocabulary::Role::target);
    CHECK(target.index_of("d") == 1u);
    CHECK_FALSE(target.index_of("a").has_value());
    CHECK_NOTHROW(require_disjoint(aux, target));
    CHECK_THROWS_AS(require_disjoint(aux, LabelVocabulary({"b"}, LabelVocabulary::Role::target)), InvalidInput);
    CHECK_THROWS_AS(LabelVocabulary({}, LabelVocabulary::Role::target), EmptyInputError);
    CHECK_THROWS_AS(LabelVocabulary({"x", "x"}, LabelVocabulary::Role::target), InvalidInput);
}

TEST_CASE("label sets join and split") {
    CHECK(join_labels({"sky", "sea"}) == "sky|sea");
    CHECK(split_labels("sky|sea") == LabelSet{"sky", "sea"});
    CHECK(same_label_set({"a", "b"}, {"b", "a"}));
    CHECK_FALSE(same_label_set({"a"}, {"a", "b"}));
}

TEST_CASE("prototype files") {
    const auto protos = parse_prototypes("a|b,1,2\nc,3,4\n");
    REQUIRE(protos.size() == 2);
    CHECK(protos.space_dim() == 2);
    CHECK(protos[0].labels == LabelSet{"a", "b"});
    CHECK(protos[1].vector(1) == 4.0);
    CHECK(parse_prototypes(format_prototypes(protos)).matrix() == protos.matrix());

    CHECK_THROWS_AS(parse_prototypes("a,1,2\nb,3\n"), FormatError);
    CHECK_THROWS_AS(parse_prototypes("a,1\na,2\n"), InvalidInput);
    CHECK_THROWS_AS(parse_prototypes(""), EmptyInputError);
}

TEST_CASE("label files round-trip") {
    test::TempDir dir("labels");
    write_labels(dir / "l.txt", {"x", "y", "x"});
    CHECK(load_labels(dir / "l.txt") == std::vector<std::string>{"x", "y", "x"});
    write_label_sets(dir / "s.txt", {{"a", "b"}, {"c"}});
    const auto sets = load_label_sets(dir / "s.txt");
    REQUIRE(sets.size() == 2);
    CHECK(sets[0] == LabelSet{"a", "b"});
}

TEST_CASE("synthetic benchmark is deterministic") {
    SynthParams p;
    p.seed = 11;
    p.shift_magnitude = 3.0;
    const auto a = synth_benchmark(p);
    const auto b = synth_benchmark(p);
    CHECK(a.aux_features.values() == b.aux_features.values());
    CHECK(a.aux_semantics.values() == b.aux_semantics.values());
    CHECK(a.target_features.values() == b.target_features.values());
    CHECK(a.target_prototypes.matrix() == b.target_prototypes.matrix());
    CHECK(a.aux_labels == b.aux_labels);
    CHECK(a.target_true_labels == b.target_true_labels);

    p.seed = 12;
    CHECK(synth_benchmark(p).aux_features.values() != a.aux_features.values());
}

TEST_CASE("synthetic benchmark shapes and disjoint vocabularies") {
    SynthParams p;
    p.n_aux_classes = 4;
    p.n_target_classes = 3;
    p.per_class = 7;
    p.feat_dim = 6;
    p.sem_dim = 9;
    const auto b = synth_benchmark(p);
    CHECK(b.aux_features.rows() == 28);
    CHECK(b.aux_features.cols() == 6);
    CHECK(b.aux_semantics.cols() == 9);
    CHECK(b.target_features.rows() == 21);
    CHECK(b.target_prototypes.size() == 3);
    CHECK(b.target_word_vectors.dim == 9);
    std::set<std::string> aux(b.aux_labels.begin(), b.aux_labels.end());
    for (const auto& t : b.target_true_labels) CHECK_FALSE(aux.contains(t));

    p.per_class = 0;
    CHECK_THROWS_AS(synth_benchmark(p), InvalidParameter);
    p.per_class = 1;
    p.shift_magnitude = -1.0;
    CHECK_THROWS_AS(synth_benchmark(p), InvalidParameter);
}

TEST_CASE("shift only moves target prototypes") {
    SynthParams p;
    p.seed = 5;
    const auto clean = synth_benchmark(p);
    p.shift_magnitude = 40.0;
    const auto shifted = synth_benchmark(p);
    CHECK(clean.aux_features.values() == shifted.aux_features.values());
    CHECK(clean.aux_semantics.values() == shifted.aux_semantics.values());
    CHECK(clean.target_features.values() == shifted.target_features.values());
    CHECK(clean.aux_prototypes.matrix() == shifted.aux_prototypes.matrix());

    // Root-mean-square displacement of the target prototypes is the shift.
    const Matrix d = shifted.target_prototypes.matrix() - clean.target_prototypes.matrix();
    const double rms = std::sqrt(d.rowwise().squaredNorm().mean());
    CHECK(rms == doctest::Approx(40.0).epsilon(1e-10));

    // Auxiliary nearest-prototype accuracy does not depend on the shift.
    const auto aux_pred_clean = nearest_prototype_labels(clean.aux_semantics.values(), clean.aux_prototypes);
    const auto aux_pred_shift = nearest_prototype_labels(shifted.aux_semantics.values(), shifted.aux_prototypes);
    CHECK(aux_pred_clean == aux_pred_shift);
}

TEST_CASE("prototype spacing is the mean nearest-neighbour distance") {
    std::vector<Prototype> items = {{{"a"}, Vector::Zero(1)}, {{"b"}, Vector::Constant(1, 1.0)},
                                    {{"c"}, Vector::Constant(1, 4.0)}};
    // nearest distances: 1, 1, 3
    CHECK(prototype_spacing(PrototypeSet(items)) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("double formatting round-trips") {
    for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-310, 123456789.123456789, -2.5e17}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK_THROWS_AS(parse_double("1.0abc"), ParseError);
    CHECK_THROWS_AS(parse_double(""), ParseError);
}

TEST_CASE("benchmark baselines around the shift") {
    double large_shift = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SynthParams p;
        p.seed = seed;
        const auto clean = synth_benchmark(p);
        const auto model = fit_ridge(clean.aux_features, clean.aux_semantics, 1.0);
        const Matrix projected = apply(model, clean.target_features.values());
        const auto pred = nearest_prototype_labels(projected, clean.target_prototypes);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == clean.target_true_labels[i];
        CHECK(correct == pred.size());

        p.shift_magnitude = 5.0 * prototype_spacing(clean.target_prototypes);
        const auto shifted = synth_benchmark(p);
        const auto wrong = nearest_prototype_labels(projected, shifted.target_prototypes);
        correct = 0;
        for (std::size_t i = 0; i < wrong.size(); ++i) correct += wrong[i] == shifted.target_true_labels[i];
        large_shift += double(correct) / double(wrong.size());
    }
    CHECK(large_shift / 10.0 <= 0.2 + 0.15);
}
