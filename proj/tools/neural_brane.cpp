// neural_brane: command-line front end for training Neural-Brane embeddings
// and evaluating them.
//
//   neural_brane train --edges g.edges --attributes g.attrs --labels g.labels
//   neural_brane evaluate --embeddings embeddings.txt --labels g.labels --task classify
//
// Every subcommand accepts --config FILE with flat `key=value` lines whose keys
// are long option names; explicit flags override values from the file.

#include "neural_brane/embedding_io.hpp"
#include "neural_brane/errors.hpp"
#include "neural_brane/eval.hpp"
#include "neural_brane/graph.hpp"
#include "neural_brane/model.hpp"
#include "neural_brane/synthetic.hpp"
#include "neural_brane/trainer.hpp"

#include "CLI11.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nb = neural_brane;
namespace fs = std::filesystem;

namespace {

struct GraphArgs {
    std::string edges;
    std::string attributes;
    std::string labels;
    std::size_t nodes = 0;
    std::size_t attrs = 0;
};

struct TrainArgs {
    std::size_t d1 = 75;
    std::size_t d2 = 75;
    std::size_t hidden = 150;
    double lr = 0.5;
    double lambda = 0.00005;
    std::size_t batch_size = 100;
    std::size_t epochs = 30;
    std::uint64_t seed = 42;
    std::string pooling = "max";
    std::string grad_agg = "mean";
    double tol = 1e-4;
    std::size_t triplets_per_epoch = 0;

    nb::TrainConfig config() const {
        nb::TrainConfig cfg;
        cfg.attr_dim = d1;
        cfg.nbr_dim = d2;
        cfg.hidden = hidden;
        cfg.learning_rate = lr;
        cfg.lambda = lambda;
        cfg.batch_size = batch_size;
        cfg.epochs = epochs;
        cfg.seed = seed;
        cfg.pooling = nb::parse_pooling(pooling);
        cfg.grad_agg = nb::parse_grad_aggregation(grad_agg);
        cfg.convergence_tol = tol;
        if (triplets_per_epoch > 0) cfg.triplets_per_epoch = triplets_per_epoch;
        cfg.validate();
        return cfg;
    }
};

struct OutputArgs {
    std::string checkpoint = "model.nbrn";
    std::string embeddings = "embeddings.txt";
    std::string format = "text";
    std::string export_layer = "h";
    std::string log_file = "-";
};

struct EvalArgs {
    std::string embeddings;
    std::string labels;
    std::string task = "classify";
    std::string ratios = "0.3,0.5,0.7";
    std::size_t repeats = 10;
    std::uint64_t seed = 7;
    double clf_l2 = 1e-4;
    std::size_t clf_iterations = 500;
    double clf_lr = 0.1;
    std::size_t runs = 10;
    std::size_t restarts = 10;
    std::string output;
};

struct AblateArgs {
    double ratio = 0.7;
    std::size_t repeats = 10;
    std::uint64_t eval_seed = 7;
    std::string export_layer = "h";
    std::string output = "ablation.csv";
};

struct SynthArgs {
    nb::PlantedPartitionOptions opts;
    std::string prefix = "planted";
};

void add_config_option(CLI::App* app) {
    // Parsed before CLI11 runs (see expand_config); registered here so it is
    // accepted and shows up in --help.
    app->add_option("--config", "Flat key=value file of option defaults; explicit flags win");
}

void add_threads_option(CLI::App* app, unsigned& threads) {
    app->add_option("--threads", threads,
                    "Worker threads for embedding export (output is identical for any value)")
        ->check(CLI::PositiveNumber);
}

void add_graph_options(CLI::App* app, GraphArgs& g, bool labels_required) {
    app->add_option("--edges", g.edges, "Edge list: `u v [w]` per line")->required();
    app->add_option("--attributes", g.attributes, "Attribute lists: `u a1 a2 ...` per line")->required();
    auto* labels = app->add_option("--labels", g.labels, "Class labels: `u c` per line");
    if (labels_required) labels->required();
    app->add_option("--nodes", g.nodes, "Node count override (0 = max id + 1)");
    app->add_option("--attrs", g.attrs, "Attribute count override (0 = max id + 1)");
}

void add_train_options(CLI::App* app, TrainArgs& t, bool with_pooling) {
    app->add_option("--d1", t.d1, "Attribute embedding dimension");
    app->add_option("--d2", t.d2, "Neighbour embedding dimension");
    app->add_option("--hidden", t.hidden, "Hidden layer width");
    app->add_option("--lr", t.lr, "SGD learning rate");
    app->add_option("--lambda", t.lambda, "L2 regularisation weight");
    app->add_option("--batch-size", t.batch_size, "Triplets per mini-batch");
    app->add_option("--epochs", t.epochs, "Maximum number of epochs");
    app->add_option("--seed", t.seed, "Seed for initialisation and triplet sampling");
    if (with_pooling) {
        app->add_option("--pooling", t.pooling, "Pooling over looked-up rows")
            ->check(CLI::IsMember({"max", "sum"}));
    }
    app->add_option("--grad-agg", t.grad_agg, "Mini-batch gradient aggregation")
        ->check(CLI::IsMember({"mean", "sum"}));
    app->add_option("--tol", t.tol, "Stop when the relative epoch-loss change drops below this");
    app->add_option("--triplets-per-epoch", t.triplets_per_epoch,
                    "Triplets per epoch (0 = edge count x batch size)");
}

void add_export_options(CLI::App* app, OutputArgs& o) {
    app->add_option("--embeddings", o.embeddings, "Output embedding file");
    app->add_option("--format", o.format, "Embedding file format")->check(CLI::IsMember({"text", "binary"}));
    app->add_option("--export-layer", o.export_layer, "Exported representation: f (features) or h (hidden)")
        ->check(CLI::IsMember({"f", "h"}));
}

nb::LoadedGraph load(const GraphArgs& args) {
    nb::GraphFiles files{args.edges, args.attributes, std::nullopt};
    if (!args.labels.empty()) files.labels = args.labels;
    nb::LoadOptions opts;
    if (args.nodes > 0) opts.node_count = args.nodes;
    if (args.attrs > 0) opts.attribute_count = args.attrs;
    nb::LoadedGraph loaded = nb::load_graph(files, opts);
    const auto& g = loaded.graph;
    spdlog::info("graph: {} nodes, {} attributes, {} edges{}", g.node_count(), g.attribute_count(),
                 g.edge_count(), g.has_labels() ? ", labelled" : "");
    if (loaded.self_loops_dropped > 0) spdlog::warn("dropped {} self-loops", loaded.self_loops_dropped);
    if (loaded.duplicate_edges > 0) spdlog::warn("merged {} duplicate edges", loaded.duplicate_edges);
    return loaded;
}

void write_embeddings(const nb::EmbeddingTable& table, const OutputArgs& o) {
    if (o.format == "binary") {
        nb::write_embeddings_binary(table, o.embeddings);
    } else {
        nb::write_embeddings_text(table, fs::path(o.embeddings));
    }
    spdlog::info("wrote {} x {} embeddings to {}", table.node_count(), table.dim(), o.embeddings);
}

/// Opens `path` for writing, or returns std::cout for "-".
class OutputStream {
public:
    explicit OutputStream(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path);
        if (!file_) throw nb::InputError("cannot open " + path + " for writing");
    }
    std::ostream& get() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void log_effective_config(const CLI::App* app) {
    std::istringstream lines(app->config_to_str(true, false));
    std::string line;
    spdlog::info("effective config for `{}`:", app->get_name());
    while (std::getline(lines, line)) {
        if (!line.empty()) spdlog::info("  {}", line);
    }
}

int run_train(const CLI::App* app, const GraphArgs& ga, const TrainArgs& ta, const OutputArgs& oa,
              unsigned threads) {
    log_effective_config(app);
    const nb::TrainConfig cfg = ta.config();
    const nb::LoadedGraph loaded = load(ga);
    const auto& g = loaded.graph;

    OutputStream log_out(oa.log_file);
    std::ostream& log = log_out.get();
    log << "epoch,loss,seconds,triplets,ranking_loss,reg_loss\n";
    nb::TrainResult result = nb::train(g, cfg, [&](const nb::EpochStats& s) {
        log << fmt::format("{},{:.10g},{:.6f},{},{:.10g},{:.10g}\n", s.epoch, s.loss.total(), s.seconds,
                           s.triplets, s.loss.ranking, s.loss.regularization);
        log.flush();
        spdlog::debug("epoch {} loss {:.6g}", s.epoch, s.loss.total());
    });
    spdlog::info("trained {} epochs{}; triplet stream digest {:016x}", result.log.epochs.size(),
                 result.log.converged ? " (converged)" : "", result.triplet_digest);

    nb::save_checkpoint(result.params, oa.checkpoint);
    spdlog::info("wrote checkpoint {}", oa.checkpoint);
    const auto table = nb::embed_all(result.params, g, cfg.pooling, nb::parse_export_layer(oa.export_layer), threads);
    if (!table.all_finite()) throw nb::NumericError("embeddings contain non-finite values");
    write_embeddings(table, oa);
    return 0;
}

int run_embed(const CLI::App* app, const GraphArgs& ga, const std::string& pooling, const OutputArgs& oa,
              unsigned threads) {
    log_effective_config(app);
    const nb::LoadedGraph loaded = load(ga);
    const nb::ModelParameters params = nb::load_checkpoint(oa.checkpoint);
    params.check_shapes(loaded.graph.node_count(), loaded.graph.attribute_count());
    const auto table = nb::embed_all(params, loaded.graph, nb::parse_pooling(pooling),
                                     nb::parse_export_layer(oa.export_layer), threads);
    write_embeddings(table, oa);
    return 0;
}

std::vector<double> parse_ratios(const std::string& text) {
    std::vector<double> ratios;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const double r = std::stod(item, &used);
            if (used != item.size() || !(r > 0.0 && r < 1.0)) throw std::invalid_argument(item);
            ratios.push_back(r);
        } catch (const std::logic_error&) {
            throw nb::InputError("--ratios: '" + item + "' is not a ratio in (0, 1)");
        }
    }
    if (ratios.empty()) throw nb::InputError("--ratios: no ratios given");
    return ratios;
}

nb::eval::LogisticOptions logistic_options(const EvalArgs& ea) {
    return {ea.clf_l2, ea.clf_iterations, ea.clf_lr};
}

void write_projection(const nb::EmbeddingTable& emb, const std::vector<nb::ClassId>* labels,
                      const std::string& path) {
    const auto proj = nb::eval::project_2d(emb.vectors);
    OutputStream out_stream(path);
    std::ostream& out = out_stream.get();
    out << (labels ? "node-id,x,y,label\n" : "node-id,x,y\n");
    for (std::size_t u = 0; u < emb.node_count(); ++u) {
        out << fmt::format("{},{:.9g},{:.9g}", u, proj.coords(u, 0), proj.coords(u, 1));
        if (labels) {
            const nb::ClassId c = (*labels)[u];
            out << ',';
            if (c != nb::kUnlabeled) out << c;
        }
        out << '\n';
    }
    spdlog::info("projection variance along components: {:.6g}, {:.6g}", proj.variance[0], proj.variance[1]);
}

int run_evaluate(const CLI::App* app, const EvalArgs& ea) {
    log_effective_config(app);
    const nb::EmbeddingTable emb = nb::read_embeddings(ea.embeddings);
    const auto labels = nb::eval::read_labels(ea.labels, emb.node_count());

    if (ea.task == "project") {
        write_projection(emb, &labels, ea.output.empty() ? "projection.csv" : ea.output);
        return 0;
    }
    OutputStream out_stream(ea.output.empty() ? "report.csv" : ea.output);
    std::ostream& csv = out_stream.get();
    if (ea.task == "classify") {
        const auto report = nb::eval::run_classification_eval(emb, labels, parse_ratios(ea.ratios), ea.repeats, ea.seed,
                                                               logistic_options(ea));
        csv << "task,train_ratio,repeats,macro_f1_mean,macro_f1_std\n";
        std::cout << "node classification (" << report.classes << " classes, " << report.repeats
                  << " splits per ratio)\n";
        for (const auto& r : report.ratios) {
            csv << fmt::format("classify,{:.4g},{},{:.10f},{:.10f}\n", r.ratio, report.repeats, r.macro_f1.mean,
                               r.macro_f1.stddev);
            std::cout << fmt::format("  train ratio {:>4.0f}%  Macro-F1 {:.4f} +/- {:.4f}\n", r.ratio * 100.0,
                                     r.macro_f1.mean, r.macro_f1.stddev);
        }
    } else {
        const auto report = nb::eval::run_clustering_eval(emb, labels, ea.runs, ea.restarts, ea.seed);
        csv << "task,clusters,runs,nmi_mean,nmi_std,purity_mean,purity_std\n";
        csv << fmt::format("cluster,{},{},{:.10f},{:.10f},{:.10f},{:.10f}\n", report.clusters, report.runs,
                           report.nmi.mean, report.nmi.stddev, report.purity.mean, report.purity.stddev);
        std::cout << fmt::format("k-means clustering (k = {}, {} runs)\n  NMI    {:.4f} +/- {:.4f}\n"
                                 "  Purity {:.4f} +/- {:.4f}\n",
                                 report.clusters, report.runs, report.nmi.mean, report.nmi.stddev,
                                 report.purity.mean, report.purity.stddev);
    }
    return 0;
}

int run_project(const CLI::App* app, const std::string& embeddings, const std::string& labels_path,
                const std::string& output) {
    log_effective_config(app);
    const nb::EmbeddingTable emb = nb::read_embeddings(embeddings);
    if (labels_path.empty()) {
        write_projection(emb, nullptr, output);
    } else {
        const auto labels = nb::eval::read_labels(labels_path, emb.node_count());
        write_projection(emb, &labels, output);
    }
    return 0;
}

int run_ablate(const CLI::App* app, const GraphArgs& ga, const TrainArgs& ta, const AblateArgs& aa,
               unsigned threads) {
    log_effective_config(app);
    const nb::LoadedGraph loaded = load(ga);
    const auto& g = loaded.graph;
    if (!g.has_labels()) throw nb::InputError("ablate-pooling needs --labels");

    OutputStream out_stream(aa.output);
    std::ostream& csv = out_stream.get();
    csv << "pooling,train_ratio,repeats,macro_f1_mean,macro_f1_std,final_loss,triplet_digest\n";
    const double ratios[] = {aa.ratio};
    std::vector<std::string> summary;
    for (const nb::Pooling pooling : {nb::Pooling::max, nb::Pooling::sum}) {
        nb::TrainConfig cfg = ta.config();
        cfg.pooling = pooling;
        const nb::TrainResult result = nb::train(g, cfg);
        const auto emb = nb::embed_all(result.params, g, pooling, nb::parse_export_layer(aa.export_layer), threads);
        const auto report = nb::eval::run_classification_eval(emb, g.labels(), ratios, aa.repeats, aa.eval_seed);
        const auto& r = report.ratios.front();
        const double final_loss = result.log.epochs.empty() ? 0.0 : result.log.epochs.back().loss.total();
        spdlog::info("pooling={} triplet stream digest {:016x}", nb::to_string(pooling), result.triplet_digest);
        csv << fmt::format("{},{:.4g},{},{:.10f},{:.10f},{:.10g},{:016x}\n", nb::to_string(pooling), aa.ratio,
                           aa.repeats, r.macro_f1.mean, r.macro_f1.stddev, final_loss, result.triplet_digest);
        summary.push_back(fmt::format("{}-pooling Macro-F1 {:.4f} +/- {:.4f}", nb::to_string(pooling),
                                      r.macro_f1.mean, r.macro_f1.stddev));
    }
    std::cout << "pooling ablation at train ratio " << aa.ratio << ":  " << summary[0] << "   |   " << summary[1]
              << '\n';
    return 0;
}

int run_synth(const CLI::App* app, const SynthArgs& sa) {
    log_effective_config(app);
    const nb::AttributedGraph g = nb::make_planted_partition(sa.opts);
    const nb::GraphFiles files{sa.prefix + ".edges", sa.prefix + ".attrs", sa.prefix + ".labels"};
    nb::write_graph(g, files);
    spdlog::info("wrote {} nodes / {} edges to {}.{{edges,attrs,labels}}", g.node_count(), g.edge_count(),
                 sa.prefix);
    return 0;
}

/// Reads a flat key=value file. Blank lines and lines starting with '#' or
/// ';' are ignored; keys may be given with or without the leading dashes.
std::vector<std::string> read_config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nb::InputError("cannot open config file " + path);
    std::vector<std::string> tokens;
    std::string line;
    std::size_t line_no = 0;
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw nb::ParseError(path, line_no, "expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        while (!key.empty() && key.front() == '-') key.erase(0, 1);
        if (key.empty()) throw nb::ParseError(path, line_no, "empty key");
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

/// Splices the contents of `--config FILE` in front of the explicit flags of
/// the subcommand. Options keep the last value given, so flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> config;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) {
            config = args[k + 1];
        } else if (args[k].rfind("--config=", 0) == 0) {
            config = args[k].substr(9);
        }
    }
    if (!config || args.empty()) return args;
    std::vector<std::string> tokens = read_config_tokens(*config);
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
    return args;
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("neural_brane");
    logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char* level = std::getenv("NEURAL_BRANE_LOG")) {
        const auto parsed = spdlog::level::from_str(level);
        if (parsed == spdlog::level::off && std::string(level) != "off") {
            spdlog::warn("unknown NEURAL_BRANE_LOG level '{}'; using info", level);
        } else {
            spdlog::set_level(parsed);
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Neural-Brane: attributed network embedding with max-pooled attribute/neighbour lookups "
                 "and a BPR triplet objective"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.get_formatter()->column_width(34);

    unsigned threads = 1;

    GraphArgs train_graph;
    TrainArgs train_args;
    OutputArgs train_out;
    auto* train = app.add_subcommand("train", "Train a model; write checkpoint, embeddings and epoch log");
    add_config_option(train);
    add_graph_options(train, train_graph, false);
    add_train_options(train, train_args, true);
    train->add_option("--checkpoint", train_out.checkpoint, "Output checkpoint file");
    add_export_options(train, train_out);
    train->add_option("--log-file", train_out.log_file, "Epoch log CSV (- = stdout)");
    add_threads_option(train, threads);

    GraphArgs embed_graph;
    OutputArgs embed_out;
    std::string embed_pooling = "max";
    auto* embed = app.add_subcommand("embed", "Compute embeddings for a graph from a trained checkpoint");
    add_config_option(embed);
    add_graph_options(embed, embed_graph, false);
    embed->add_option("--checkpoint", embed_out.checkpoint, "Checkpoint written by `train`")->required();
    embed->add_option("--pooling", embed_pooling, "Pooling used when the model was trained")
        ->check(CLI::IsMember({"max", "sum"}));
    add_export_options(embed, embed_out);
    add_threads_option(embed, threads);

    EvalArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "Node classification, clustering or 2-D projection");
    add_config_option(evaluate);
    evaluate->add_option("--embeddings", eval_args.embeddings, "Embedding file (text or binary)")->required();
    evaluate->add_option("--labels", eval_args.labels, "Class labels: `u c` per line")->required();
    evaluate->add_option("--task", eval_args.task, "Evaluation task")
        ->check(CLI::IsMember({"classify", "cluster", "project"}));
    evaluate->add_option("--ratios", eval_args.ratios, "Comma-separated training ratios for classification");
    evaluate->add_option("--repeats", eval_args.repeats, "Random splits per ratio");
    evaluate->add_option("--seed", eval_args.seed, "Seed for splits and k-means");
    evaluate->add_option("--clf-l2", eval_args.clf_l2, "Logistic regression L2 penalty");
    evaluate->add_option("--clf-iterations", eval_args.clf_iterations, "Logistic regression gradient steps");
    evaluate->add_option("--clf-lr", eval_args.clf_lr, "Logistic regression step size");
    evaluate->add_option("--runs", eval_args.runs, "Independent k-means runs (clustering)");
    evaluate->add_option("--restarts", eval_args.restarts, "k-means++ restarts per run; best WCSS kept");
    evaluate->add_option("--output", eval_args.output,
                         "Report CSV (default report.csv; projection.csv for --task project; - = stdout)");
    add_threads_option(evaluate, threads);

    std::string proj_embeddings, proj_labels, proj_output = "projection.csv";
    auto* project = app.add_subcommand("project", "Write a PCA projection to 2-D as node-id,x,y[,label] CSV");
    add_config_option(project);
    project->add_option("--embeddings", proj_embeddings, "Embedding file (text or binary)")->required();
    project->add_option("--labels", proj_labels, "Optional class labels to append as a column");
    project->add_option("--output", proj_output, "Output CSV (- = stdout)");

    GraphArgs ablate_graph;
    TrainArgs ablate_train;
    AblateArgs ablate_args;
    auto* ablate = app.add_subcommand("ablate-pooling",
                                      "Train with max and with sum pooling under one seed and compare Macro-F1");
    add_config_option(ablate);
    add_graph_options(ablate, ablate_graph, true);
    add_train_options(ablate, ablate_train, false);
    ablate->add_option("--ratio", ablate_args.ratio, "Training ratio for the classification eval")
        ->check(CLI::Range(0.0, 1.0));
    ablate->add_option("--repeats", ablate_args.repeats, "Random splits");
    ablate->add_option("--eval-seed", ablate_args.eval_seed, "Seed for the evaluation splits");
    ablate->add_option("--export-layer", ablate_args.export_layer, "Evaluated representation: f or h")
        ->check(CLI::IsMember({"f", "h"}));
    ablate->add_option("--output", ablate_args.output, "Result CSV (- = stdout)");
    add_threads_option(ablate, threads);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Write a planted-partition attributed graph");
    add_config_option(synth);
    synth->add_option("--nodes", synth_args.opts.nodes, "Number of nodes");
    synth->add_option("--communities", synth_args.opts.communities, "Number of communities");
    synth->add_option("--p-intra", synth_args.opts.p_intra, "Edge probability inside a community");
    synth->add_option("--p-inter", synth_args.opts.p_inter, "Edge probability across communities");
    synth->add_option("--attributes", synth_args.opts.attributes, "Number of attributes");
    synth->add_option("--attr-owned", synth_args.opts.attr_owned, "P(attribute) for its own community");
    synth->add_option("--attr-other", synth_args.opts.attr_other, "P(attribute) for other communities");
    synth->add_option("--seed", synth_args.opts.seed, "Generator seed");
    synth->add_option("--prefix", synth_args.prefix, "Writes PREFIX.edges, PREFIX.attrs, PREFIX.labels");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
        app.parse(args);

        if (*train) return run_train(train, train_graph, train_args, train_out, threads);
        if (*embed) return run_embed(embed, embed_graph, embed_pooling, embed_out, threads);
        if (*evaluate) return run_evaluate(evaluate, eval_args);
        if (*project) return run_project(project, proj_embeddings, proj_labels, proj_output);
        if (*ablate) return run_ablate(ablate, ablate_graph, ablate_train, ablate_args, threads);
        if (*synth) return run_synth(synth, synth_args);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const nb::InputError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const nb::NumericError& e) {
        spdlog::error("numeric failure: {}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("internal error: {}", e.what());
        return 2;
    }
}
