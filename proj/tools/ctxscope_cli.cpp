// ctxscope command-line front end. Talks to the library only through ctxscope.h.

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxscope/ctxscope.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct CliError {
    int code;
    std::string message;
};

int exit_code(ctxs_status status) {
    switch (status) {
        case CTXS_OK:
            return 0;
        case CTXS_ERR_USAGE:
            return kExitUsage;
        case CTXS_ERR_INPUT:
        case CTXS_ERR_IO:
        case CTXS_ERR_UNDEFINED:
            return kExitInput;
        case CTXS_ERR_INTERNAL:
            return kExitInternal;
    }
    return kExitInternal;
}

void check(ctxs_status status) {
    if (status != CTXS_OK) {
        throw CliError{exit_code(status), std::string(ctxs_status_name(status)) + ": " + ctxs_last_error()};
    }
}

[[noreturn]] void usage(const std::string& message) { throw CliError{kExitUsage, message}; }

using Dist = std::unique_ptr<ctxs_dist, decltype(&ctxs_dist_free)>;
using Data = std::unique_ptr<ctxs_dataset, decltype(&ctxs_dataset_free)>;
using Options = std::unique_ptr<ctxs_options, decltype(&ctxs_options_free)>;
using Report = std::unique_ptr<ctxs_report, decltype(&ctxs_report_free)>;
using Text = std::unique_ptr<char, decltype(&ctxs_string_free)>;

Dist load_dist(const std::string& path) {
    ctxs_dist* raw = nullptr;
    check(ctxs_dist_load_csv(path.c_str(), &raw));
    return Dist(raw, ctxs_dist_free);
}

Text take(char* s) { return Text(s, ctxs_string_free); }

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        throw CliError{kExitInput, "i/o error: cannot write '" + path + "'"};
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CliError{kExitInput, "i/o error: cannot read '" + path + "'"};
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string truth_path_for(const std::string& out) {
    const std::string suffix = ".csv";
    if (out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return out.substr(0, out.size() - suffix.size()) + ".truth.json";
    }
    return out + ".truth.json";
}

std::size_t thread_cap() {
    const char* env = std::getenv("CTXSCOPE_THREADS");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(env, &used);
        if (used != std::string(env).size()) {
            throw std::invalid_argument(env);
        }
        return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
        usage(std::string("CTXSCOPE_THREADS must be a non-negative integer, got '") + env + "'");
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct GenerateArgs {
    std::string kind;
    std::string blocks;
    std::uint64_t seed = 0;
    bool shuffle = false;
    std::string out;
    std::string truth;
};

void run_generate(const GenerateArgs& a) {
    ctxs_dist* raw = nullptr;
    char* truth_raw = nullptr;
    if (a.kind == "table2") {
        if (!a.blocks.empty() || a.shuffle || !a.truth.empty()) {
            usage("--blocks, --shuffle and --truth apply to planted only");
        }
        check(ctxs_dist_table2(&raw));
    } else {
        if (a.blocks.empty()) {
            usage("generate planted needs --blocks");
        }
        check(ctxs_dist_planted(a.blocks.c_str(), a.seed, a.shuffle ? 1 : 0, &raw, &truth_raw));
    }
    Dist dist(raw, ctxs_dist_free);
    Text truth = take(truth_raw);
    const std::string out = a.out.empty() ? a.kind + ".csv" : a.out;
    if (out == "-") {
        char* csv = nullptr;
        check(ctxs_dist_to_csv(dist.get(), &csv));
        emit(take(csv).get(), "-");
    } else {
        check(ctxs_dist_save_csv(dist.get(), out.c_str()));
    }
    if (truth) {
        std::string truth_out = a.truth;
        if (truth_out.empty()) {
            if (out == "-") {
                usage("writing the CSV to stdout needs --truth for the ground-truth file");
            }
            truth_out = truth_path_for(out);
        }
        emit(truth.get(), truth_out);
    }
}

struct SampleArgs {
    std::string dist;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void run_sample(const SampleArgs& a) {
    if (a.n == 0) {
        usage("-n must be at least 1");
    }
    Dist dist = load_dist(a.dist);
    ctxs_dataset* raw = nullptr;
    check(ctxs_sample(dist.get(), a.n, a.seed, &raw));
    Data data(raw, ctxs_dataset_free);
    if (a.out.empty() || a.out == "-") {
        char* csv = nullptr;
        check(ctxs_dataset_to_csv(data.get(), &csv));
        emit(take(csv).get(), "-");
    } else {
        check(ctxs_dataset_save_csv(data.get(), a.out.c_str()));
    }
}

struct AnalyzeArgs {
    std::string dist;
    std::string data;
    std::optional<std::string> epsilon;
    std::optional<double> confidence;
    std::optional<std::uint64_t> min_support;
    bool bonferroni = false;
    bool laplace = false;
    std::optional<std::size_t> exact_limit;
    std::optional<std::size_t> max_context;
    std::optional<std::size_t> beam;
    std::optional<std::size_t> probes;
    std::optional<std::uint64_t> seed;
    std::string format = "json";
    std::string out;
    bool stamp = false;
};

void run_analyze(const AnalyzeArgs& a, const std::vector<std::string>& argv) {
    if (a.dist.empty() == a.data.empty()) {
        usage("give exactly one of --dist or --data");
    }
    ctxs_options* raw_options = nullptr;
    check(ctxs_options_new(&raw_options));
    Options options(raw_options, ctxs_options_free);
    ctxs_options* o = options.get();
    if (a.epsilon) {
        check(ctxs_options_set_epsilon(o, a.epsilon->c_str()));
    }
    if (a.confidence) {
        check(ctxs_options_set_confidence(o, *a.confidence));
    }
    if (a.min_support) {
        check(ctxs_options_set_min_support(o, *a.min_support));
    }
    check(ctxs_options_set_bonferroni(o, a.bonferroni ? 1 : 0));
    check(ctxs_options_set_laplace(o, a.laplace ? 1 : 0));
    if (a.exact_limit) {
        check(ctxs_options_set_exact_limit(o, *a.exact_limit));
    }
    if (a.max_context) {
        check(ctxs_options_set_max_context(o, *a.max_context));
    }
    if (a.beam) {
        check(ctxs_options_set_beam(o, *a.beam));
    }
    if (a.probes) {
        check(ctxs_options_set_probes(o, *a.probes));
    }
    if (a.seed) {
        check(ctxs_options_set_seed(o, *a.seed));
    }
    check(ctxs_options_set_threads(o, thread_cap()));
    std::vector<const char*> args;
    for (const std::string& s : argv) {
        args.push_back(s.c_str());
    }
    const std::string stamp = a.stamp ? utc_timestamp() : std::string();
    check(ctxs_options_set_manifest(o, "analyze", args.data(), args.size(), a.stamp ? stamp.c_str() : nullptr));

    ctxs_report* raw_report = nullptr;
    if (!a.dist.empty()) {
        Dist dist = load_dist(a.dist);
        check(ctxs_analyze_dist(dist.get(), o, &raw_report));
    } else {
        ctxs_dataset* raw_data = nullptr;
        check(ctxs_dataset_load_csv(a.data.c_str(), &raw_data));
        Data data(raw_data, ctxs_dataset_free);
        check(ctxs_analyze_dataset(data.get(), o, &raw_report));
    }
    Report report(raw_report, ctxs_report_free);
    char* text = nullptr;
    check(ctxs_report_render(report.get(), a.format.c_str(), &text));
    emit(take(text).get(), a.out);
}

struct ReportArgs {
    std::string path;
    std::string format = "md";
    std::string out;
};

void run_report(const ReportArgs& a) {
    const std::string json = slurp(a.path);
    char* text = nullptr;
    check(ctxs_render_report_text(json.c_str(), a.format.c_str(), &text));
    emit(take(text).get(), a.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature relevance and context analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("ctxscope ") + ctxs_version());

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "Write a reference or planted distribution CSV");
    generate->add_option("kind", gen.kind, "table2 or planted")->required()->check(CLI::IsMember({"table2", "planted"}));
    generate->add_option("--blocks", gen.blocks,
                         "Planted blocks, e.g. table2:2@1/2,xor:1@1/10,irrelevant:3,dup:0@2");
    generate->add_option("--seed", gen.seed, "Seed for --shuffle");
    generate->add_flag("--shuffle", gen.shuffle, "Permute the feature order");
    generate->add_option("--out", gen.out, "Output CSV ('-' for stdout; default <kind>.csv)");
    generate->add_option("--truth", gen.truth, "Ground-truth JSON path (default next to --out)");

    SampleArgs smp;
    CLI::App* sample = app.add_subcommand("sample", "Draw an i.i.d. dataset from a distribution CSV");
    sample->add_option("--dist", smp.dist, "Distribution CSV")->required();
    sample->add_option("-n,--n", smp.n, "Number of instances")->required();
    sample->add_option("--seed", smp.seed, "Random seed");
    sample->add_option("--out", smp.out, "Output CSV (default stdout)");

    AnalyzeArgs an;
    CLI::App* analyze = app.add_subcommand("analyze", "Profile every feature and feature pair");
    auto* dist_opt = analyze->add_option("--dist", an.dist, "Exact distribution CSV");
    auto* data_opt = analyze->add_option("--data", an.data, "Dataset CSV");
    dist_opt->excludes(data_opt);
    analyze->add_option("--epsilon", an.epsilon, "Fixed tolerance (decimal or fraction; 0 = exact on counts)");
    analyze->add_option("--confidence", an.confidence, "Confidence for the Hoeffding tolerance (default 0.95)");
    analyze->add_option("--min-support", an.min_support, "Minimum instances per conditioning cell (default 5)");
    analyze->add_flag("--bonferroni", an.bonferroni, "Divide the tail probability by the comparison count");
    analyze->add_flag("--laplace", an.laplace, "Add one pseudo-count to every cell");
    analyze->add_option("--exact-limit", an.exact_limit, "Exhaustive search up to this many candidate features");
    analyze->add_option("--max-context", an.max_context, "Heuristic lattice depth");
    analyze->add_option("--beam", an.beam, "Heuristic beam width");
    analyze->add_option("--probes", an.probes, "Random subsets per feature in heuristic mode");
    analyze->add_option("--seed", an.seed, "Seed for the random probes");
    analyze->add_option("--format", an.format, "json, md or text")->check(CLI::IsMember({"json", "md", "text"}));
    analyze->add_option("--out", an.out, "Output path (default stdout)");
    analyze->add_flag("--stamp", an.stamp, "Record the current UTC time in the manifest");

    ReportArgs rep;
    CLI::App* report = app.add_subcommand("report", "Render a saved report");
    report->add_option("report", rep.path, "Report JSON")->required();
    report->add_option("--format", rep.format, "md, text or json")->check(CLI::IsMember({"json", "md", "text"}));
    report->add_option("--out", rep.out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (generate->parsed()) {
            run_generate(gen);
        } else if (sample->parsed()) {
            run_sample(smp);
        } else if (analyze->parsed()) {
            run_analyze(an, std::vector<std::string>(argv + 1, argv + argc));
        } else if (report->parsed()) {
            run_report(rep);
        }
    } catch (const CliError& e) {
        std::cerr << "ctxscope: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "ctxscope: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
