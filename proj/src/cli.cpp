#include "zsl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "zsl/config.hpp"
#include "zsl/dataset.hpp"
#include "zsl/embedding.hpp"
#include "zsl/error.hpp"
#include "zsl/eval.hpp"
#include "zsl/multilabel.hpp"
#include "zsl/pipeline.hpp"
#include "zsl/projection.hpp"

namespace zsl {

namespace fs = std::filesystem;

namespace {

std::string shape(const FeatureMatrix& m) {
    return std::to_string(m.rows()) + " x " + std::to_string(m.cols());
}

PropagateOptions propagate_options(const RunConfig& cfg) {
    PropagateOptions o;
    o.alpha = cfg.number("alpha");
    o.tol = cfg.number("tol");
    o.max_iter = static_cast<int>(std::min<std::size_t>(cfg.count("max_iter"), 1u << 30));
    return o;
}

ZslOptions zsl_options(const RunConfig& cfg) {
    ZslOptions o;
    o.lambda = cfg.number("lambda");
    o.normalization = parse_normalization(cfg.text("normalization"));
    o.cca.m = static_cast<Index>(cfg.count_or_auto("m").value_or(0));
    o.cca.reg = cfg.number_or_auto("reg");
    o.cca.weight_power = cfg.number("weight_power");
    o.hlp.k = static_cast<Index>(cfg.count("k"));
    o.hlp.sigma = cfg.number_or_auto("sigma");
    o.hlp.propagation = propagate_options(cfg);
    return o;
}

// Multi-class inputs, loaded and cross-checked.
struct ZslInputs {
    FeatureMatrix aux_features;
    std::vector<FeatureMatrix> aux_semantics;
    std::vector<std::string> aux_labels;
    FeatureMatrix target_features;
    std::vector<std::string> target_labels;
    std::vector<PrototypeSet> prototypes;
};

ZslInputs load_zsl_inputs(const RunConfig& cfg, bool need_target) {
    cfg.require({"aux_features", "aux_semantics"});
    ZslInputs in;
    in.aux_features = load_matrix(cfg.path("aux_features"), "features");
    std::size_t s = 0;
    for (const auto& p : cfg.paths("aux_semantics")) {
        in.aux_semantics.push_back(load_matrix(p, "semantic" + std::to_string(s++)));
        if (in.aux_semantics.back().rows() != in.aux_features.rows())
            throw ShapeError("aux_semantics '" + p.string() + "' has " + std::to_string(in.aux_semantics.back().rows()) +
                             " rows, aux_features has " + std::to_string(in.aux_features.rows()));
    }
    if (cfg.has("aux_labels")) {
        cfg.require({"aux_labels"});
        in.aux_labels = load_labels(cfg.path("aux_labels"));
        if (in.aux_labels.size() != std::size_t(in.aux_features.rows()))
            throw ShapeError("aux_labels has " + std::to_string(in.aux_labels.size()) + " lines for " +
                             std::to_string(in.aux_features.rows()) + " rows");
    }
    if (!need_target) return in;

    cfg.require({"target_features", "prototypes"});
    in.target_features = load_matrix(cfg.path("target_features"), "features");
    if (in.target_features.cols() != in.aux_features.cols())
        throw ShapeError("target_features has " + std::to_string(in.target_features.cols()) +
                         " columns, aux_features has " + std::to_string(in.aux_features.cols()));
    const auto proto_paths = cfg.paths("prototypes");
    if (proto_paths.size() != in.aux_semantics.size())
        throw ShapeError("prototypes lists " + std::to_string(proto_paths.size()) + " files for " +
                         std::to_string(in.aux_semantics.size()) + " semantic views");
    for (std::size_t i = 0; i < proto_paths.size(); ++i) {
        in.prototypes.push_back(load_prototypes(proto_paths[i]));
        if (in.prototypes.back().space_dim() != in.aux_semantics[i].cols())
            throw ShapeError("prototypes '" + proto_paths[i].string() + "' have dimension " +
                             std::to_string(in.prototypes.back().space_dim()) + ", semantic view has " +
                             std::to_string(in.aux_semantics[i].cols()));
    }
    if (cfg.has("target_labels")) {
        cfg.require({"target_labels"});
        in.target_labels = load_labels(cfg.path("target_labels"));
        if (in.target_labels.size() != std::size_t(in.target_features.rows()))
            throw ShapeError("target_labels has " + std::to_string(in.target_labels.size()) + " lines for " +
                             std::to_string(in.target_features.rows()) + " rows");
    }
    if (!in.aux_labels.empty()) {
        std::vector<std::string> aux_names = in.aux_labels;
        std::sort(aux_names.begin(), aux_names.end());
        aux_names.erase(std::unique(aux_names.begin(), aux_names.end()), aux_names.end());
        std::vector<std::string> target_names;
        for (const auto& p : in.prototypes.front().items())
            for (const auto& l : p.labels) target_names.push_back(l);
        std::sort(target_names.begin(), target_names.end());
        target_names.erase(std::unique(target_names.begin(), target_names.end()), target_names.end());
        require_disjoint(LabelVocabulary(aux_names, LabelVocabulary::Role::auxiliary),
                         LabelVocabulary(target_names, LabelVocabulary::Role::target));
    }
    return in;
}

// Multi-label inputs.
struct MlInputs {
    FeatureMatrix aux_features;
    FeatureMatrix aux_semantics;
    FeatureMatrix target_features;
    WordVectorTable word_vectors;
    LabelVocabulary vocab{{"_"}, LabelVocabulary::Role::target};
    std::vector<LabelSet> truth;
};

MlInputs load_ml_inputs(const RunConfig& cfg) {
    cfg.require({"aux_features", "aux_semantics", "target_features", "word_vectors", "target_vocab"});
    MlInputs in;
    in.aux_features = load_matrix(cfg.path("aux_features"), "features");
    const auto sem = cfg.paths("aux_semantics");
    if (sem.size() != 1) throw InvalidParameter("mlzsl takes exactly one aux_semantics file (word-vector space)");
    in.aux_semantics = load_matrix(sem.front(), "word");
    if (in.aux_semantics.rows() != in.aux_features.rows())
        throw ShapeError("aux_semantics and aux_features row counts differ");
    in.target_features = load_matrix(cfg.path("target_features"), "features");
    if (in.target_features.cols() != in.aux_features.cols())
        throw ShapeError("target_features and aux_features column counts differ");
    in.word_vectors = load_word_vectors(cfg.path("word_vectors"));
    if (in.word_vectors.dim != in.aux_semantics.cols())
        throw ShapeError("word vectors have dimension " + std::to_string(in.word_vectors.dim) +
                         ", aux_semantics has " + std::to_string(in.aux_semantics.cols()));
    in.vocab = LabelVocabulary(load_labels(cfg.path("target_vocab")), LabelVocabulary::Role::target);
    if (cfg.has("target_label_sets")) {
        cfg.require({"target_label_sets"});
        in.truth = load_label_sets(cfg.path("target_label_sets"));
        if (in.truth.size() != std::size_t(in.target_features.rows()))
            throw ShapeError("target_label_sets has " + std::to_string(in.truth.size()) + " lines for " +
                             std::to_string(in.target_features.rows()) + " rows");
    }
    return in;
}

void prepare_output(const RunConfig& cfg) { fs::create_directories(cfg.output_dir()); }

// Subcommands -----------------------------------------------------------------

void cmd_validate(const RunConfig& cfg, std::ostream& out) {
    bool any = false;
    if (cfg.has("prototypes") || cfg.has("target_features")) {
        const auto in = load_zsl_inputs(cfg, true);
        out << "aux_features     " << shape(in.aux_features) << "\n";
        for (std::size_t s = 0; s < in.aux_semantics.size(); ++s)
            out << "aux_semantics[" << s << "] " << shape(in.aux_semantics[s]) << "\n";
        if (!in.aux_labels.empty()) out << "aux_labels       " << in.aux_labels.size() << "\n";
        out << "target_features  " << shape(in.target_features) << "\n";
        for (std::size_t s = 0; s < in.prototypes.size(); ++s)
            out << "prototypes[" << s << "]    " << in.prototypes[s].size() << " x " << in.prototypes[s].space_dim()
                << "\n";
        if (!in.target_labels.empty()) out << "target_labels    " << in.target_labels.size() << "\n";
        any = true;
    } else if (cfg.has("aux_features")) {
        const auto in = load_zsl_inputs(cfg, false);
        out << "aux_features     " << shape(in.aux_features) << "\n";
        for (std::size_t s = 0; s < in.aux_semantics.size(); ++s)
            out << "aux_semantics[" << s << "] " << shape(in.aux_semantics[s]) << "\n";
        any = true;
    }
    if (cfg.has("word_vectors")) {
        const auto in = load_ml_inputs(cfg);
        out << "word_vectors     " << in.word_vectors.entries.size() << " x " << in.word_vectors.dim << "\n";
        out << "target_vocab     " << in.vocab.size() << "\n";
        for (const auto& name : in.vocab.names())
            if (!in.word_vectors.find(name)) throw MissingVectorError("no word vector for label '" + name + "'");
        if (!in.truth.empty()) out << "target_label_sets " << in.truth.size() << "\n";
        any = true;
    }
    if (!any) throw InvalidParameter("config names no inputs to validate");
    parse_normalization(cfg.text("normalization"));
    parse_metric(cfg.text("metric"));
    parse_synthesis_mode(cfg.text("synthesis"));
    out << "seed             " << cfg.seed() << "\n";
    out << "ok\n";
}

void cmd_fit_projection(const RunConfig& cfg, std::ostream& out) {
    const auto in = load_zsl_inputs(cfg, false);
    prepare_output(cfg);
    const double lambda = cfg.number("lambda");
    const auto norm = parse_normalization(cfg.text("normalization"));
    for (std::size_t s = 0; s < in.aux_semantics.size(); ++s) {
        const auto model = fit_ridge(in.aux_features, in.aux_semantics[s], lambda, norm);
        const auto file = cfg.output_dir() / ("projection_" + std::to_string(s) + ".txt");
        save_projection_model(file, model);
        const Matrix residual = apply(model, in.aux_features.values()) - in.aux_semantics[s].values();
        out << "projection " << s << ": " << model.d_in() << " -> " << model.d_out() << ", training rmse "
            << format_double(std::sqrt(residual.squaredNorm() / double(residual.size()))) << ", written to "
            << file.string() << "\n";
    }
}

void write_embedding(const RunConfig& cfg, const ZslResult& r, std::ostream& out) {
    save_cca_model(cfg.output_dir() / "cca", r.cca);
    for (std::size_t s = 0; s < r.projections.size(); ++s)
        save_projection_model(cfg.output_dir() / ("projection_" + std::to_string(s) + ".txt"), r.projections[s]);
    out << "embedding dimension " << r.cca.m() << "\n";
    out << "canonical correlations";
    for (Index i = 0; i < r.cca.rho.size(); ++i) out << " " << format_double(r.cca.rho(i));
    out << "\n";
}

void cmd_fit_embedding(const RunConfig& cfg, std::ostream& out) {
    const auto in = load_zsl_inputs(cfg, true);
    prepare_output(cfg);
    const auto r = fit_zsl_embedding(in.aux_features, in.aux_semantics, in.target_features, in.prototypes,
                                     zsl_options(cfg));
    write_embedding(cfg, r, out);
}

void cmd_export_embedding(const RunConfig& cfg, std::ostream& out) {
    const auto in = load_zsl_inputs(cfg, true);
    prepare_output(cfg);
    const auto r = fit_zsl_embedding(in.aux_features, in.aux_semantics, in.target_features, in.prototypes,
                                     zsl_options(cfg));
    for (std::size_t v = 0; v < r.embedded.size(); ++v) {
        write_matrix(cfg.output_dir() / ("embedded_view_" + std::to_string(v) + ".csv"), r.embedded[v].values());
        write_prototypes(cfg.output_dir() / ("embedded_prototypes_view_" + std::to_string(v) + ".txt"),
                         r.embedded_prototypes[v]);
    }
    out << "exported " << r.embedded.size() << " views of " << r.embedded.front().rows() << " rows in "
        << r.cca.m() << " dimensions to " << cfg.output_dir().string() << "\n";
}

void cmd_zsl(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto in = load_zsl_inputs(cfg, true);
    prepare_output(cfg);
    const auto r = run_zsl(in.aux_features, in.aux_semantics, in.target_features, in.prototypes, zsl_options(cfg));
    for (const auto& w : r.scores.warnings) err << "warning: " << w << "\n";
    write_labels(cfg.output_dir() / "predictions.txt", r.predictions);
    write_text_file(cfg.output_dir() / "scores.csv", format_scores_csv(r.scores));
    std::string weights = "view_pair,weight\n";
    for (std::size_t g = 0; g < r.scores.graph_weights.size(); ++g)
        weights += std::to_string(g) + "," + format_double(r.scores.graph_weights[g]) + "\n";
    write_text_file(cfg.output_dir() / "graph_weights.csv", weights);
    out << "predicted " << r.predictions.size() << " instances over " << r.scores.class_names.size()
        << " classes\n";
    if (!in.target_labels.empty()) {
        const auto report = multiclass_accuracy(r.predictions, in.target_labels);
        write_text_file(cfg.output_dir() / "report.csv", format_multiclass_csv(report));
        out << format_multiclass_table(report);
    }
}

void cmd_mlzsl(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto in = load_ml_inputs(cfg);
    prepare_output(cfg);
    const auto metric = parse_metric(cfg.text("metric"));
    const auto mode = parse_synthesis_mode(cfg.text("synthesis"));
    const auto max_card = cfg.count_or_auto("max_cardinality").value_or(std::min<std::size_t>(in.vocab.size(), 4));
    const auto protos = power_set_prototypes(in.vocab, in.word_vectors, max_card, mode, cfg.count("power_set_cap"));
    for (const auto& w : in.word_vectors.warnings) err << "warning: " << w << "\n";

    auto model = fit_ridge(in.aux_features, in.aux_semantics, cfg.number("lambda"),
                           parse_normalization(cfg.text("normalization")));
    SelfTrainOptions st;
    st.rounds = cfg.count("self_train_rounds");
    st.keep_fraction = cfg.number("keep_fraction");
    st.augmentation_weight = cfg.number("augmentation_weight");
    st.metric = metric;
    const auto adapted = self_train_adapt(model, in.target_features.values(), protos, st);
    for (const auto& w : adapted.warnings) err << "warning: " << w << "\n";
    model = adapted.model;

    Matrix x = apply(model, in.target_features.values());
    PrototypeSet space_protos = protos;
    const auto space = cfg.text("ml_space");
    if (space == "embedding") {
        CcaOptions co;
        co.m = static_cast<Index>(cfg.count_or_auto("m").value_or(0));
        co.reg = cfg.number_or_auto("reg");
        co.weight_power = cfg.number("weight_power");
        const auto cca = fit_mvcca({in.target_features, FeatureMatrix(x, "word")}, co);
        x = embed(cca, x, 1);
        space_protos = embed_prototypes(cca, protos, 1);
    } else if (space != "word") {
        throw InvalidParameter("unknown ml_space '" + space + "' (word|embedding)");
    }

    std::vector<LabelSet> predictions;
    Matrix proto_scores;
    const auto method = cfg.text("method");
    if (method == "dmp") {
        predictions = dmp_predict(x, space_protos, metric);
        proto_scores.resize(x.rows(), Index(space_protos.size()));
        for (Index r = 0; r < x.rows(); ++r)
            for (std::size_t p = 0; p < space_protos.size(); ++p)
                proto_scores(r, Index(p)) = -distance(x.row(r).transpose(), space_protos[p].vector, metric);
    } else if (method == "tramp") {
        auto t = tramp_predict(x, space_protos, static_cast<Index>(cfg.count("k")), cfg.number("alpha"),
                               cfg.number_or_auto("sigma"), propagate_options(cfg));
        for (const auto& w : t.scores.warnings) err << "warning: " << w << "\n";
        predictions = std::move(t.labels);
        proto_scores = std::move(t.scores.f);
    } else {
        throw InvalidParameter("unknown method '" + method + "' (dmp|tramp)");
    }
    const Matrix label_scores = label_scores_from_prototypes(proto_scores, space_protos, in.vocab);

    write_label_sets(cfg.output_dir() / "predictions.txt", predictions);
    LabelScores ls;
    ls.f = label_scores;
    ls.class_names = in.vocab.names();
    write_text_file(cfg.output_dir() / "scores.csv", format_scores_csv(ls));
    out << "predicted " << predictions.size() << " instances over " << space_protos.size() << " label sets ("
        << method << ", " << space << " space, " << st.rounds << " self-training rounds)\n";
    if (!in.truth.empty()) {
        const auto mode_name = cfg.text("hamming_threshold");
        ThresholdMode threshold;
        if (mode_name == "centered_zero") threshold = ThresholdMode::centered_zero;
        else if (mode_name == "top_k") threshold = ThresholdMode::top_k;
        else throw InvalidParameter("unknown hamming_threshold '" + mode_name + "' (centered_zero|top_k)");
        const auto report = multilabel_losses(label_scores, in.truth, in.vocab, threshold);
        const double set_hamming = hamming_loss(predictions, in.truth, in.vocab);
        write_text_file(cfg.output_dir() / "report.csv",
                        format_multilabel_csv(report) + "prediction_hamming_loss," + format_double(set_hamming) + "\n");
        out << format_multilabel_table(report);
        out << "prediction hamming loss " << format_double(set_hamming) << "\n";
    }
}

void cmd_synth(const RunConfig& cfg, std::ostream& out) {
    SynthParams p;
    p.n_aux_classes = cfg.count("synth_aux_classes");
    p.n_target_classes = cfg.count("synth_target_classes");
    p.per_class = cfg.count("synth_per_class");
    p.feat_dim = cfg.count("synth_feat_dim");
    p.sem_dim = cfg.count("synth_sem_dim");
    p.center_spread = cfg.number("synth_center_spread");
    p.cluster_std = cfg.number("synth_cluster_std");
    p.center_offset = cfg.number("synth_center_offset");
    p.seed = cfg.seed();
    if (cfg.has("synth_shift_spacing")) {
        // Shift measured in units of the unshifted target prototype spacing.
        p.shift_magnitude = 0.0;
        p.shift_magnitude = cfg.number("synth_shift_spacing") * prototype_spacing(synth_benchmark(p).target_prototypes);
    } else {
        p.shift_magnitude = cfg.number("synth_shift");
    }
    const auto b = synth_benchmark(p);

    const auto dir = cfg.output_dir();
    fs::create_directories(dir);
    write_matrix(dir / "aux_features.csv", b.aux_features.values());
    write_matrix(dir / "aux_semantics.csv", b.aux_semantics.values());
    write_labels(dir / "aux_labels.txt", b.aux_labels);
    write_prototypes(dir / "aux_prototypes.txt", b.aux_prototypes);
    write_matrix(dir / "target_features.csv", b.target_features.values());
    write_labels(dir / "target_labels.txt", b.target_true_labels);
    write_prototypes(dir / "target_prototypes.txt", b.target_prototypes);

    std::string wv;
    std::vector<std::string> vocab;
    for (const auto& proto : b.target_prototypes.items()) {
        vocab.push_back(proto.labels.front());
        wv += proto.labels.front();
        for (Index i = 0; i < proto.vector.size(); ++i) wv += " " + format_double(proto.vector(i));
        wv += "\n";
    }
    write_text_file(dir / "word_vectors.txt", wv);
    write_labels(dir / "target_vocab.txt", vocab);

    std::string c = "# synthetic benchmark, seed " + std::to_string(p.seed) + ", shift " +
                     format_double(p.shift_magnitude) + "\n";
    c += "aux_features = aux_features.csv\n";
    c += "aux_semantics = aux_semantics.csv\n";
    c += "aux_labels = aux_labels.txt\n";
    c += "target_features = target_features.csv\n";
    c += "target_labels = target_labels.txt\n";
    c += "prototypes = target_prototypes.txt\n";
    c += "word_vectors = word_vectors.txt\n";
    c += "target_vocab = target_vocab.txt\n";
    c += "target_label_sets = target_labels.txt\n";
    c += "max_cardinality = 1\n";
    c += "seed = " + std::to_string(p.seed) + "\n";
    c += "output_dir = results\n";
    write_text_file(dir / "zsl.cfg", c);

    out << "synthetic benchmark written to " << dir.string() << "\n";
    out << "aux_features     " << shape(b.aux_features) << "\n";
    out << "aux_semantics    " << shape(b.aux_semantics) << "\n";
    out << "target_features  " << shape(b.target_features) << "\n";
    out << "target classes   " << b.target_prototypes.size() << "\n";
    out << "shift magnitude  " << format_double(b.shift_magnitude) << "\n";
    out << "config           " << (dir / "zsl.cfg").string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transductive multi-view zero-shot learning"};
    app.name("zsl");
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> overrides;

    using Handler = std::function<void(const RunConfig&)>;
    const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
        {"validate", "Load every configured input and check shapes", [&](const RunConfig& c) { cmd_validate(c, out); }},
        {"fit-projection", "Fit ridge projections into each semantic view",
         [&](const RunConfig& c) { cmd_fit_projection(c, out); }},
        {"fit-embedding", "Fit projections and the multi-view embedding",
         [&](const RunConfig& c) { cmd_fit_embedding(c, out); }},
        {"zsl", "Multi-class prediction by hypergraph label propagation",
         [&](const RunConfig& c) { cmd_zsl(c, out, err); }},
        {"mlzsl", "Multi-label prediction (dmp or tramp, optional self-training)",
         [&](const RunConfig& c) { cmd_mlzsl(c, out, err); }},
        {"synth", "Write a synthetic benchmark and a matching config", [&](const RunConfig& c) { cmd_synth(c, out); }},
        {"export-embedding", "Write embedded coordinates of every view",
         [&](const RunConfig& c) { cmd_export_embedding(c, out); }},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help, handler] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Config file (key = value)")->required();
        sub->add_option("--override", overrides, "Replace a config value, key=value (repeatable)");
        subs.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }

    try {
        auto cfg = RunConfig::load(config_path);
        for (const auto& o : overrides) cfg.override_with(o);
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) std::get<2>(commands[i])(cfg);
    } catch (const SingularSystemError& e) {
        err << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
    return exit_ok;
}

}  // namespace zsl
