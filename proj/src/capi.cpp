#include "ctxscope/ctxscope.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctxscope/context.hpp"
#include "ctxscope/csv_io.hpp"
#include "ctxscope/datagen.hpp"
#include "ctxscope/error.hpp"
#include "ctxscope/report.hpp"

struct ctxs_dist {
    ctxscope::ExactDistribution value;
};

struct ctxs_dataset {
    ctxscope::Dataset value;
};

struct ctxs_options {
    std::optional<ctxscope::Rational> epsilon;
    std::optional<double> confidence;
    std::optional<std::uint64_t> min_support;
    bool bonferroni = false;
    bool laplace = false;
    ctxscope::SearchBudget budget;
    std::size_t threads = 0;
    std::optional<ctxscope::RunManifest> manifest;
};

struct ctxs_report {
    std::string json;
};

namespace {

using namespace ctxscope;

thread_local std::string last_error;

ctxs_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage:
            return CTXS_ERR_USAGE;
        case ErrorKind::Input:
            return CTXS_ERR_INPUT;
        case ErrorKind::Io:
            return CTXS_ERR_IO;
        case ErrorKind::UndefinedConditional:
            return CTXS_ERR_UNDEFINED;
        case ErrorKind::Invariant:
            return CTXS_ERR_INTERNAL;
    }
    return CTXS_ERR_INTERNAL;
}

template <class Body>
ctxs_status guarded(Body&& body) {
    last_error.clear();
    try {
        body();
        return CTXS_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const nlohmann::json::exception& e) {
        last_error = std::string("malformed report: ") + e.what();
        return CTXS_ERR_INPUT;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return CTXS_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return CTXS_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return CTXS_ERR_INTERNAL;
    }
}

void need(const void* p, const char* name) {
    if (p == nullptr) {
        fail(ErrorKind::Usage, std::string(name) + " must not be null");
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

bool has_empirical_settings(const ctxs_options& o) {
    return (o.epsilon && *o.epsilon != 0) || o.confidence || o.min_support || o.bonferroni || o.laplace;
}

AnalysisOptions analysis_options(const ctxs_options* o) {
    AnalysisOptions a;
    if (o != nullptr) {
        a.budget = o->budget;
        a.threads = o->threads;
    }
    return a;
}

RunManifest finish_manifest(const ctxs_options* o, const std::string& digest) {
    RunManifest m = o != nullptr && o->manifest ? *o->manifest : RunManifest{};
    m.input_digests = {digest};
    m.seed = o != nullptr ? o->budget.seed : 0;
    m.tool_version = std::string(tool_version());
    return m;
}

}  // namespace

extern "C" {

const char* ctxs_version(void) { return tool_version().data(); }

const char* ctxs_last_error(void) { return last_error.c_str(); }

const char* ctxs_status_name(ctxs_status status) {
    switch (status) {
        case CTXS_OK:
            return "ok";
        case CTXS_ERR_USAGE:
            return "usage error";
        case CTXS_ERR_INPUT:
            return "input error";
        case CTXS_ERR_IO:
            return "i/o error";
        case CTXS_ERR_UNDEFINED:
            return "undefined conditional";
        case CTXS_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

void ctxs_string_free(char* s) { std::free(s); }

ctxs_status ctxs_dist_load_csv(const char* path, ctxs_dist** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new ctxs_dist{load_distribution_csv(path)};
    });
}

ctxs_status ctxs_dist_parse_csv(const char* text, ctxs_dist** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        std::istringstream in(text);
        *out = new ctxs_dist{read_distribution_csv(in)};
    });
}

ctxs_status ctxs_dist_save_csv(const ctxs_dist* dist, const char* path) {
    return guarded([&] {
        need(dist, "dist");
        need(path, "path");
        save_distribution_csv(path, dist->value);
    });
}

ctxs_status ctxs_dist_to_csv(const ctxs_dist* dist, char** out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        std::ostringstream s;
        write_distribution_csv(s, dist->value);
        *out = copy_string(s.str());
    });
}

ctxs_status ctxs_dist_digest(const ctxs_dist* dist, char** out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        *out = copy_string(distribution_digest(dist->value));
    });
}

size_t ctxs_dist_feature_count(const ctxs_dist* dist) {
    return dist == nullptr ? 0 : dist->value.space().feature_count();
}

ctxs_status ctxs_dist_table2(ctxs_dist** out) {
    return guarded([&] {
        need(out, "out");
        *out = new ctxs_dist{table2()};
    });
}

ctxs_status ctxs_dist_duplicate(const ctxs_dist* dist, size_t feature, ctxs_dist** out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        *out = new ctxs_dist{duplicate_feature(dist->value, feature)};
    });
}

ctxs_status ctxs_dist_planted(const char* spec, uint64_t seed, int shuffle, ctxs_dist** out, char** truth_json) {
    return guarded([&] {
        need(spec, "spec");
        need(out, "out");
        PlantedSpec parsed = parse_planted_spec(spec);
        parsed.shuffle = shuffle != 0;
        PlantedDistribution p = planted(parsed, seed);
        char* truth = truth_json != nullptr ? copy_string(ground_truth_json(p.truth)) : nullptr;
        *out = new ctxs_dist{std::move(p.distribution)};
        if (truth_json != nullptr) {
            *truth_json = truth;
        }
    });
}

void ctxs_dist_free(ctxs_dist* dist) { delete dist; }

ctxs_status ctxs_dataset_load_csv(const char* path, ctxs_dataset** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new ctxs_dataset{load_dataset_csv(path)};
    });
}

ctxs_status ctxs_dataset_parse_csv(const char* text, ctxs_dataset** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        std::istringstream in(text);
        *out = new ctxs_dataset{read_dataset_csv(in)};
    });
}

ctxs_status ctxs_dataset_save_csv(const ctxs_dataset* data, const char* path) {
    return guarded([&] {
        need(data, "data");
        need(path, "path");
        save_dataset_csv(path, data->value);
    });
}

ctxs_status ctxs_dataset_to_csv(const ctxs_dataset* data, char** out) {
    return guarded([&] {
        need(data, "data");
        need(out, "out");
        std::ostringstream s;
        write_dataset_csv(s, data->value);
        *out = copy_string(s.str());
    });
}

size_t ctxs_dataset_size(const ctxs_dataset* data) { return data == nullptr ? 0 : data->value.size(); }

ctxs_status ctxs_sample(const ctxs_dist* dist, uint64_t n, uint64_t seed, ctxs_dataset** out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        *out = new ctxs_dataset{sample(dist->value, n, seed)};
    });
}

void ctxs_dataset_free(ctxs_dataset* data) { delete data; }

ctxs_status ctxs_options_new(ctxs_options** out) {
    return guarded([&] {
        need(out, "out");
        *out = new ctxs_options{};
    });
}

void ctxs_options_free(ctxs_options* options) { delete options; }

ctxs_status ctxs_options_set_epsilon(ctxs_options* options, const char* literal) {
    return guarded([&] {
        need(options, "options");
        need(literal, "literal");
        Rational eps;
        try {
            eps = parse_rational(literal);
        } catch (const Error& e) {
            fail(ErrorKind::Usage, std::string("epsilon: ") + e.what());
        }
        if (eps < 0) {
            fail(ErrorKind::Usage, "epsilon must not be negative");
        }
        options->epsilon = std::move(eps);
    });
}

ctxs_status ctxs_options_set_confidence(ctxs_options* options, double confidence) {
    return guarded([&] {
        need(options, "options");
        if (!(confidence > 0.0 && confidence < 1.0)) {
            fail(ErrorKind::Usage, "confidence must lie strictly between 0 and 1");
        }
        options->confidence = confidence;
    });
}

ctxs_status ctxs_options_set_min_support(ctxs_options* options, uint64_t min_support) {
    return guarded([&] {
        need(options, "options");
        if (min_support < 1) {
            fail(ErrorKind::Usage, "min support must be at least 1");
        }
        options->min_support = min_support;
    });
}

ctxs_status ctxs_options_set_bonferroni(ctxs_options* options, int enabled) {
    return guarded([&] {
        need(options, "options");
        options->bonferroni = enabled != 0;
    });
}

ctxs_status ctxs_options_set_laplace(ctxs_options* options, int enabled) {
    return guarded([&] {
        need(options, "options");
        options->laplace = enabled != 0;
    });
}

ctxs_status ctxs_options_set_exact_limit(ctxs_options* options, size_t limit) {
    return guarded([&] {
        need(options, "options");
        SearchBudget b = options->budget;
        b.exact_limit = limit;
        b.validate();
        options->budget = b;
    });
}

ctxs_status ctxs_options_set_max_context(ctxs_options* options, size_t size) {
    return guarded([&] {
        need(options, "options");
        options->budget.max_context_size = size;
    });
}

ctxs_status ctxs_options_set_beam(ctxs_options* options, size_t width) {
    return guarded([&] {
        need(options, "options");
        SearchBudget b = options->budget;
        b.beam_width = width;
        b.validate();
        options->budget = b;
    });
}

ctxs_status ctxs_options_set_probes(ctxs_options* options, size_t probes) {
    return guarded([&] {
        need(options, "options");
        options->budget.random_probes = probes;
    });
}

ctxs_status ctxs_options_set_seed(ctxs_options* options, uint64_t seed) {
    return guarded([&] {
        need(options, "options");
        options->budget.seed = seed;
    });
}

ctxs_status ctxs_options_set_threads(ctxs_options* options, size_t threads) {
    return guarded([&] {
        need(options, "options");
        options->threads = threads;
    });
}

ctxs_status ctxs_options_set_manifest(ctxs_options* options, const char* command, const char* const* args,
                                      size_t arg_count, const char* timestamp) {
    return guarded([&] {
        need(options, "options");
        need(command, "command");
        if (arg_count > 0) {
            need(args, "args");
        }
        RunManifest m;
        m.command = command;
        for (size_t k = 0; k < arg_count; ++k) {
            need(args[k], "args[k]");
            m.arguments.emplace_back(args[k]);
        }
        if (timestamp != nullptr) {
            m.timestamp = timestamp;
        }
        options->manifest = std::move(m);
    });
}

ctxs_status ctxs_analyze_dist(const ctxs_dist* dist, const ctxs_options* options, ctxs_report** out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        if (options != nullptr && has_empirical_settings(*options)) {
            fail(ErrorKind::Usage,
                 "epsilon, confidence, min support, Bonferroni and Laplace settings apply to datasets only; "
                 "an exact distribution is always compared exactly");
        }
        AnalysisOptions a = analysis_options(options);
        a.comparison = ComparisonConfig::exact();
        AnalysisReport report = analyze(dist->value, a);
        report.manifest = finish_manifest(options, report.input_digest);
        *out = new ctxs_report{report_to_json(report)};
    });
}

ctxs_status ctxs_analyze_dataset(const ctxs_dataset* data, const ctxs_options* options, ctxs_report** out) {
    return guarded([&] {
        need(data, "data");
        need(out, "out");
        const ctxs_options defaults;
        const ctxs_options& o = options != nullptr ? *options : defaults;
        AnalysisOptions a = analysis_options(options);
        const std::uint64_t min_support = o.min_support.value_or(5);
        if (o.epsilon && o.confidence) {
            fail(ErrorKind::Usage, "give either epsilon or confidence, not both");
        }
        if (o.epsilon && *o.epsilon == 0) {
            if (o.min_support || o.bonferroni) {
                fail(ErrorKind::Usage, "epsilon 0 selects exact comparison, which takes no min support or Bonferroni");
            }
            a.comparison = ComparisonConfig::exact();
        } else if (o.epsilon) {
            if (o.bonferroni) {
                fail(ErrorKind::Usage, "Bonferroni correction needs a confidence level, not a fixed epsilon");
            }
            a.comparison = ComparisonConfig::with_epsilon(*o.epsilon, min_support);
        } else {
            a.comparison = ComparisonConfig::with_confidence(o.confidence.value_or(0.95), min_support, o.bonferroni);
        }
        const EmpiricalDistribution counts = empirical_from_dataset(data->value, o.laplace);
        AnalysisReport report = analyze(counts, a);
        report.input_digest = dataset_digest(data->value);
        report.manifest = finish_manifest(options, report.input_digest);
        *out = new ctxs_report{report_to_json(report)};
    });
}

ctxs_status ctxs_report_json(const ctxs_report* report, char** out) {
    return guarded([&] {
        need(report, "report");
        need(out, "out");
        *out = copy_string(report->json);
    });
}

ctxs_status ctxs_report_render(const ctxs_report* report, const char* format, char** out) {
    return guarded([&] {
        need(report, "report");
        need(format, "format");
        need(out, "out");
        *out = copy_string(render_report(report->json, parse_report_format(format)));
    });
}

ctxs_status ctxs_render_report_text(const char* report_json, const char* format, char** out) {
    return guarded([&] {
        need(report_json, "report_json");
        need(format, "format");
        need(out, "out");
        *out = copy_string(render_report(report_json, parse_report_format(format)));
    });
}

void ctxs_report_free(ctxs_report* report) { delete report; }

}  // extern "C"
