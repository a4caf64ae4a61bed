// gapflood: batch driver for clustering, alignment, gap detection and evaluation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapflood/gapflood.hpp"

namespace fs = std::filesystem;
using namespace gapflood;

namespace {

struct Flags {
    std::string config_path;
    std::string embeddings, corpus, clustering, output_dir, output;
    std::string filter = "threshold", neighbor_mode = "incident", matching = "greedy", group_by = "none";
    double tau = kDefaultTau, delta = kDefaultDelta, epsilon = kDefaultEpsilon;
    int max_iter = kDefaultMaxIterations;
    std::size_t k = 0, k_max = 30, jobs = 1;
    std::uint64_t seed = 0;
};

struct Options {
    CLI::Option* embeddings = nullptr;
    CLI::Option* corpus = nullptr;
    CLI::Option* clustering = nullptr;
    CLI::Option* output_dir = nullptr;
    CLI::Option* filter = nullptr;
    CLI::Option* tau = nullptr;
    CLI::Option* delta = nullptr;
    CLI::Option* epsilon = nullptr;
    CLI::Option* max_iter = nullptr;
    CLI::Option* k = nullptr;
    CLI::Option* k_max = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* neighbor_mode = nullptr;
    CLI::Option* matching = nullptr;
    CLI::Option* group_by = nullptr;
    CLI::Option* jobs = nullptr;
};

bool given(const CLI::Option* o) { return o && o->count() > 0; }

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

// Defaults, then the JSON config file, then flags given on the command line.
PipelineConfig resolve_config(const Flags& f, const Options& o) {
    PipelineConfig cfg;
    if (!f.config_path.empty()) cfg = config_from_json(read_json_file(f.config_path), cfg);
    if (given(o.embeddings)) cfg.embeddings_path = f.embeddings;
    if (given(o.corpus)) cfg.corpus_path = f.corpus;
    if (given(o.clustering)) cfg.clustering_path = f.clustering;
    if (given(o.output_dir)) cfg.output_dir = f.output_dir;
    if (given(o.filter)) cfg.filter = parse_filter_kind(f.filter);
    if (given(o.tau)) cfg.tau = f.tau;
    if (given(o.delta)) cfg.delta = f.delta;
    if (given(o.epsilon)) cfg.epsilon = f.epsilon;
    if (given(o.max_iter)) cfg.max_iter = f.max_iter;
    if (given(o.k)) cfg.k = f.k;
    if (given(o.k_max)) cfg.k_max = f.k_max;
    if (given(o.seed)) cfg.seed = f.seed;
    if (given(o.neighbor_mode)) cfg.neighbor_mode = parse_neighbor_mode(f.neighbor_mode);
    if (given(o.matching)) cfg.matching = parse_match_strategy(f.matching);
    if (given(o.group_by)) {
        if (f.group_by != "dir" && f.group_by != "none") throw ValidationError("--group-by must be dir or none");
        cfg.group_by_dir = f.group_by == "dir";
    }
    if (given(o.jobs)) cfg.jobs = f.jobs;
    cfg.validate();
    if (cfg.embeddings_path.empty()) throw ValidationError("--embeddings is required");
    if (cfg.corpus_path.empty()) throw ValidationError("--corpus is required");
    return cfg;
}

void print_curve(const PredicateClustering& c) {
    std::cerr << "chosen k = " << c.k << "\n";
    for (std::size_t i = 0; i < c.wcss_curve.size(); ++i)
        std::cerr << "  WCSS(" << i + 1 << ") = " << c.wcss_curve[i] << "\n";
}

int cmd_cluster(const Flags& f, const Options& o) {
    auto cfg = resolve_config(f, o);
    auto store = load_vectors_file(cfg.embeddings_path);
    auto corpus = load_corpus_file(cfg.corpus_path);
    auto clustering = build_clustering(corpus, store, cfg.k, cfg.k_max, cfg.seed);
    print_curve(clustering);
    const std::string out = f.output.empty() ? "clustering.json" : f.output;
    write_text_file(out, to_json(clustering).dump(2) + "\n");
    std::cerr << "wrote " << out << "\n";
    return 0;
}

int cmd_run(const Flags& f, const Options& o) {
    auto cfg = resolve_config(f, o);
    auto store = load_vectors_file(cfg.embeddings_path);
    auto corpus = load_corpus_file(cfg.corpus_path);
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);

    PredicateClustering clustering;
    if (!cfg.clustering_path.empty()) {
        clustering = clustering_from_json(read_json_file(cfg.clustering_path));
    } else if (!corpus.empty()) {
        clustering = build_clustering(corpus, store, cfg.k, cfg.k_max, cfg.seed);
        print_curve(clustering);
        write_text_file(dir / "clustering.json", to_json(clustering).dump(2) + "\n");
    }
    if (corpus.empty()) std::cerr << "warning: corpus " << cfg.corpus_path << " has no records\n";
    for (const auto& w : validate_corpus(corpus, &clustering))
        std::cerr << "warning: " << w.question_id << "/" << w.student_answer_id << ": " << w.message << "\n";

    auto run = run_pipeline(corpus, store, clustering, cfg);
    for (const auto& fl : run.failures)
        std::cerr << "error: record " << fl.question_id << "/" << fl.student_answer_id << " skipped: " << fl.message
                  << "\n";

    write_text_file(dir / "predictions.json", run.predictions.dump(2) + "\n");
    write_text_file(dir / "report.json", report_document(run, cfg).dump(2) + "\n");
    std::ostringstream csv;
    write_report_csv(run.report, csv);
    write_text_file(dir / "report.csv", csv.str());

    const auto& m = run.report.macro.metrics;
    std::cerr << "records: " << corpus.size() << ", failures: " << run.failures.size()
              << ", questions: " << run.report.macro.questions << "\n"
              << "Macro-P " << m.precision << "  Macro-R " << m.recall << "  Macro-F1 " << m.f1 << "\n";
    return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path) {
    auto a = report_from_json(read_json_file(a_path));
    auto b = report_from_json(read_json_file(b_path));
    auto s = compare_reports(a, b);
    std::printf("paired two-tailed t-test on per-question F1 (n = %zu, df = %zu)\n", s.per_question_delta.size(),
                s.test.df);
    if (s.test.degeneracy == TTestDegeneracy::identical)
        std::printf("t = 0 (identical per-question F1)\np = 1\n");
    else if (s.test.degeneracy == TTestDegeneracy::zero_variance)
        std::printf("t = %sinf (constant non-zero difference)\np < 1e-12\n", s.test.t > 0 ? "+" : "-");
    else
        std::printf("t = %.6f\np = %.6g\n", s.test.t, s.test.p);
    std::printf("Macro-F1 delta (first - second) = %+.6f\n", s.macro_f1_delta);
    for (const auto& [q, d] : s.per_question_delta) std::printf("  %s %+.6f\n", q.c_str(), d);
    return 0;
}

int cmd_stats(const std::string& corpus_path) {
    auto corpus = load_corpus_file(corpus_path);
    auto s = dataset_stats(corpus);
    std::printf("N = %zu\nLength_mu = %.4f (%ld)\nLength_sigma = %.4f (%ld)\nLength_max = %zu\nD = %.4f\n", s.n,
                s.length_mean, s.rounded_mean(), s.length_stddev, s.rounded_stddev(), s.length_max, s.gap_density);
    return 0;
}

int cmd_validate(const std::string& corpus_path, const std::string& clustering_path) {
    auto corpus = load_corpus_file(corpus_path);
    std::optional<PredicateClustering> clustering;
    if (!clustering_path.empty()) clustering = clustering_from_json(read_json_file(clustering_path));
    auto warnings = validate_corpus(corpus, clustering ? &*clustering : nullptr);
    for (const auto& w : warnings) std::printf("%s/%s: %s\n", w.question_id.c_str(), w.student_answer_id.c_str(), w.message.c_str());
    std::fprintf(stderr, "%zu records, %zu warnings\n", corpus.size(), warnings.size());
    return 0;
}

void add_pipeline_flags(CLI::App* sub, Flags& f, Options& o) {
    sub->add_option("--config", f.config_path, "JSON config file; command-line flags override it");
    o.embeddings = sub->add_option("--embeddings", f.embeddings, "word2vec text-format vectors");
    o.corpus = sub->add_option("--corpus", f.corpus, "JSON Lines corpus");
    o.k = sub->add_option("--k", f.k, "fixed number of predicate clusters (0 = elbow)");
    o.k_max = sub->add_option("--k-max", f.k_max, "largest k tried by the elbow rule")->capture_default_str();
    o.seed = sub->add_option("--seed", f.seed, "k-means seed")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gapflood: gap identification by directed answer-graph alignment"};
    app.require_subcommand(1);
    Flags f;
    Options o;

    auto* cluster = app.add_subcommand("cluster", "cluster all corpus predicates and write a clustering file");
    add_pipeline_flags(cluster, f, o);
    cluster->add_option("--output,-o", f.output, "clustering JSON output path (default clustering.json)");

    Flags rf;
    Options ro;
    auto* run = app.add_subcommand("run", "align, detect gaps and evaluate every record");
    add_pipeline_flags(run, rf, ro);
    ro.clustering = run->add_option("--clustering", rf.clustering, "reuse a clustering file instead of building one");
    ro.output_dir = run->add_option("--output-dir", rf.output_dir, "directory for predictions/report files");
    ro.filter = run->add_option("--filter", rf.filter, "threshold | exact | best")->capture_default_str();
    ro.tau = run->add_option("--tau", rf.tau, "filter threshold")->capture_default_str();
    ro.delta = run->add_option("--delta", rf.delta, "ROUGE-2 F1 match threshold")->capture_default_str();
    ro.epsilon = run->add_option("--epsilon", rf.epsilon, "fixpoint residual tolerance")->capture_default_str();
    ro.max_iter = run->add_option("--max-iter", rf.max_iter, "fixpoint iteration cap")->capture_default_str();
    ro.neighbor_mode =
        run->add_option("--neighbor-mode", rf.neighbor_mode, "incident | outgoing")->capture_default_str();
    ro.matching = run->add_option("--matching", rf.matching, "greedy | optimal gap matching")->capture_default_str();
    ro.group_by = run->add_option("--group-by", rf.group_by, "dir | none")->capture_default_str();
    ro.jobs = run->add_option("--jobs", rf.jobs, "worker threads")->capture_default_str();

    std::string report_a, report_b;
    auto* compare = app.add_subcommand("compare", "paired t-test between two report.json files");
    compare->add_option("first", report_a, "report.json")->required();
    compare->add_option("second", report_b, "report.json")->required();

    std::string stats_corpus;
    auto* stats = app.add_subcommand("stats", "descriptive statistics of a corpus");
    stats->add_option("--corpus", stats_corpus, "JSON Lines corpus")->required();

    std::string val_corpus, val_clustering;
    auto* validate = app.add_subcommand("validate", "report non-fatal corpus problems");
    validate->add_option("--corpus", val_corpus, "JSON Lines corpus")->required();
    validate->add_option("--clustering", val_clustering, "clustering file for coverage checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cluster->parsed()) return cmd_cluster(f, o);
        if (run->parsed()) return cmd_run(rf, ro);
        if (compare->parsed()) return cmd_compare(report_a, report_b);
        if (stats->parsed()) return cmd_stats(stats_corpus);
        if (validate->parsed()) return cmd_validate(val_corpus, val_clustering);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
