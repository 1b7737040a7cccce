#include "ctxscope/report.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "ctxscope/error.hpp"

namespace ctxscope {

namespace {

using Json = nlohmann::ordered_json;

std::string mode_name(ComparisonMode mode) { return mode == ComparisonMode::Exact ? "exact" : "empirical"; }

Json assignment_json(const FeatureSpace& space, const Assignment& a) {
    Json out = Json::object();
    for (const Binding& b : a.bindings()) {
        out[space.feature_name(b.feature)] = space.domain(b.feature)[b.value];
    }
    return out;
}

Json context_json(const FeatureSpace& space, ContextSubset context) {
    Json out = Json::array();
    for (std::size_t f : context.members()) {
        out.push_back(space.feature_name(f));
    }
    return out;
}

Json witness_json(const FeatureSpace& space, const std::optional<Witness>& w) {
    if (!w) {
        return nullptr;
    }
    return Json{{"feature", space.feature_name(w->feature)},
                {"context", context_json(space, w->context)},
                {"assignment", assignment_json(space, w->context_assignment)},
                {"value", space.domain(w->feature)[w->value]},
                {"class", space.class_domain()[w->y]},
                {"lhs", to_fraction_string(w->lhs)},
                {"rhs", to_fraction_string(w->rhs)},
                {"gap", to_fraction_string(w->gap)},
                {"lhs_support", w->lhs_support},
                {"rhs_support", w->rhs_support}};
}

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json sensitivity_json(const FeatureSpace& space, const SensitivityEdge& e) {
    Json witness = nullptr;
    if (e.witness) {
        const SensitivityWitness& w = *e.witness;
        witness = Json{{"context", context_json(space, w.context)},
                       {"assignment", assignment_json(space, w.context_assignment)},
                       {"x_i", space.domain(e.i)[w.value_i]},
                       {"x_j", space.domain(e.j)[w.value_j]},
                       {"class", space.class_domain()[w.y]},
                       {"p_both", to_fraction_string(w.p_both)},
                       {"p_given_j", to_fraction_string(w.p_given_j)},
                       {"p_given_i", to_fraction_string(w.p_given_i)},
                       {"both_support", w.both_support},
                       {"j_support", w.j_support},
                       {"i_support", w.i_support}};
    }
    Json table = Json::array();
    for (const ConditionalCell& c : e.class_given_pair) {
        table.push_back({{"x_i", space.domain(e.i)[c.values[0]]},
                         {"x_j", space.domain(e.j)[c.values[1]]},
                         {"class", space.class_domain()[c.y]},
                         {"p", to_fraction_string(c.p)},
                         {"support", c.support}});
    }
    return Json{{"i", space.feature_name(e.i)},
                {"j", space.feature_name(e.j)},
                {"i_index", e.i},
                {"j_index", e.j},
                {"weak", e.weak},
                {"strong_i_to_j", e.strong_i_to_j},
                {"strong_j_to_i", e.strong_j_to_i},
                {"exact", e.exact},
                {"contexts_evaluated", e.contexts_evaluated},
                {"witness", std::move(witness)},
                {"class_given_pair", std::move(table)}};
}

Json manifest_json(const std::optional<RunManifest>& m) {
    if (!m) {
        return nullptr;
    }
    return Json{{"command", m->command},
                {"arguments", m->arguments},
                {"input_digests", m->input_digests},
                {"seed", optional_json(m->seed)},
                {"tool_version", m->tool_version},
                {"timestamp", optional_json(m->timestamp)}};
}

// ---- rendering ----

[[noreturn]] void bad_report(const std::string& what) { fail(ErrorKind::Input, "invalid report: " + what); }

void require(const Json& j, const char* key, Json::value_t type, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        bad_report(where + " lacks '" + key + "'");
    }
    const Json& v = j.at(key);
    const bool ok = type == Json::value_t::number_unsigned ? v.is_number_integer() && v.get<long long>() >= 0
                                                          : v.type() == type;
    if (!ok) {
        bad_report(where + "." + key + " has the wrong type");
    }
}

void require_nullable_count(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !(j.at(key).is_null() || (j.at(key).is_number_integer() && j.at(key).get<long long>() >= 0))) {
        bad_report(where + "." + key + " must be a count or null");
    }
}

void require_nullable_object(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !(j.at(key).is_null() || j.at(key).is_object())) {
        bad_report(where + "." + key + " must be an object or null");
    }
}

Json parse(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        bad_report(std::string("JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) {
        bad_report("top level is not an object");
    }
    if (!doc.contains("schema") || doc["schema"] != kReportSchema) {
        bad_report("schema is not '" + std::string(kReportSchema) + "'");
    }
    if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"] != kReportVersion) {
        bad_report("unsupported version (expected " + std::to_string(kReportVersion) + ")");
    }
    using V = Json::value_t;
    require(doc, "mode", V::string, "report");
    require(doc, "source", V::string, "report");
    require(doc, "total", V::number_unsigned, "report");
    require(doc, "space", V::object, "report");
    require(doc["space"], "features", V::array, "space");
    require(doc["space"], "class", V::object, "space");
    require(doc["space"]["class"], "name", V::string, "space.class");
    require(doc["space"]["class"], "domain", V::array, "space.class");
    require(doc, "class_marginal", V::array, "report");
    require(doc, "config", V::object, "report");
    require(doc["config"], "comparison", V::object, "config");
    require(doc["config"], "budget", V::object, "config");
    require(doc, "features", V::array, "report");
    require(doc, "edges", V::array, "report");
    require(doc, "pairs_exhaustive", V::boolean, "report");
    require(doc, "warnings", V::array, "report");
    require(doc, "provenance", V::object, "report");
    for (const Json& c : doc["class_marginal"]) {
        require(c, "class", V::string, "class_marginal");
        require(c, "p", V::string, "class_marginal");
    }
    for (const Json& f : doc["features"]) {
        const std::string where = "features[]";
        require(f, "name", V::string, where);
        require(f, "relevance", V::string, where);
        require(f, "label", V::string, where);
        require_nullable_count(f, "alpha", where);
        require_nullable_count(f, "beta", where);
        require(f, "alpha_exact", V::boolean, where);
        require(f, "beta_exact", V::boolean, where);
        require_nullable_object(f, "alpha_witness", where);
        require_nullable_object(f, "beta_witness", where);
        require_nullable_object(f, "relevance_witness", where);
    }
    for (const Json& e : doc["edges"]) {
        const std::string where = "edges[]";
        require(e, "i", V::string, where);
        require(e, "j", V::string, where);
        require(e, "weak", V::boolean, where);
        require(e, "strong_i_to_j", V::boolean, where);
        require(e, "strong_j_to_i", V::boolean, where);
        require(e, "exact", V::boolean, where);
        require_nullable_object(e, "witness", where);
    }
    return doc;
}

std::string decimal(const std::string& fraction) {
    return fraction + " (" + to_decimal_string(parse_rational(fraction)) + ")";
}

std::string condition(const std::string& class_name, const std::string& y, const std::vector<std::string>& bound) {
    std::string out = "p(" + class_name + "=" + y;
    for (std::size_t k = 0; k < bound.size(); ++k) {
        out += (k == 0 ? " | " : ", ") + bound[k];
    }
    return out + ")";
}

std::vector<std::string> bindings_of(const Json& assignment) {
    std::vector<std::string> out;
    for (const auto& [name, value] : assignment.items()) {
        out.push_back(name + "=" + value.get<std::string>());
    }
    return out;
}

std::string size_cell(const Json& value, bool exact, const char* bound) {
    if (value.is_null()) {
        return "-";
    }
    return (exact ? std::string() : std::string(bound) + " ") + std::to_string(value.get<long long>());
}

std::string witness_line(const Json& w, const std::string& class_name) {
    std::vector<std::string> ctx = bindings_of(w["assignment"]);
    std::vector<std::string> with = ctx;
    with.insert(with.begin(), w["feature"].get<std::string>() + "=" + w["value"].get<std::string>());
    const std::string y = w["class"];
    return condition(class_name, y, with) + " = " + decimal(w["lhs"]) + " vs " + condition(class_name, y, ctx) +
           " = " + decimal(w["rhs"]);
}

std::string edge_line(const Json& e, const std::string& class_name) {
    const Json& w = e["witness"];
    const std::vector<std::string> ctx = bindings_of(w["assignment"]);
    const std::string xi = e["i"].get<std::string>() + "=" + w["x_i"].get<std::string>();
    const std::string xj = e["j"].get<std::string>() + "=" + w["x_j"].get<std::string>();
    std::vector<std::string> both{xi, xj};
    both.insert(both.end(), ctx.begin(), ctx.end());
    std::vector<std::string> only_j{xj};
    only_j.insert(only_j.end(), ctx.begin(), ctx.end());
    std::vector<std::string> only_i{xi};
    only_i.insert(only_i.end(), ctx.begin(), ctx.end());
    const std::string y = w["class"];
    return condition(class_name, y, both) + " = " + decimal(w["p_both"]) + " vs " + condition(class_name, y, only_j) +
           " = " + decimal(w["p_given_j"]) + " and " + condition(class_name, y, only_i) + " = " +
           decimal(w["p_given_i"]);
}

std::string strong_text(const Json& e, const char* arrow) {
    std::vector<std::string> parts;
    if (e["strong_i_to_j"].get<bool>()) {
        parts.push_back(e["i"].get<std::string>() + " " + arrow + " " + e["j"].get<std::string>());
    }
    if (e["strong_j_to_i"].get<bool>()) {
        parts.push_back(e["j"].get<std::string>() + " " + arrow + " " + e["i"].get<std::string>());
    }
    if (parts.empty()) {
        return "none";
    }
    std::string out = parts[0];
    for (std::size_t k = 1; k < parts.size(); ++k) {
        out += ", " + parts[k];
    }
    return out;
}

std::string comparison_text(const Json& cmp) {
    if (cmp["mode"] == "exact") {
        return "exact rational inequality";
    }
    std::string out;
    if (!cmp["confidence"].is_null()) {
        std::ostringstream conf;
        conf << cmp["confidence"].get<double>();
        out = "Hoeffding tolerance at confidence " + conf.str() + " per comparison";
        if (cmp["bonferroni"].get<bool>()) {
            out += ", Bonferroni over " + std::to_string(cmp["comparison_count"].get<unsigned long long>()) +
                   " comparisons";
        }
    } else {
        out = "epsilon " + decimal(cmp["epsilon"]);
    }
    return out + ", min support " + std::to_string(cmp["min_support"].get<unsigned long long>());
}

std::string search_text(const Json& b) {
    return "exhaustive up to " + std::to_string(b["exact_limit"].get<unsigned long long>()) +
           " candidate features, otherwise beam " + std::to_string(b["beam_width"].get<unsigned long long>()) +
           ", depth " + std::to_string(b["max_context_size"].get<unsigned long long>()) + ", probes " +
           std::to_string(b["random_probes"].get<unsigned long long>()) + ", seed " +
           std::to_string(b["seed"].get<unsigned long long>());
}

std::string source_text(const Json& doc) {
    const std::string total = std::to_string(doc["total"].get<unsigned long long>());
    return doc["source"] == "counts" ? "sampled counts (total " + total + ")"
                                     : "exact table (common denominator " + total + ")";
}

std::string marginal_text(const Json& doc, const std::string& class_name) {
    std::string out;
    for (const Json& c : doc["class_marginal"]) {
        out += (out.empty() ? "" : ", ") + condition(class_name, c["class"], {}) + " = " + decimal(c["p"]);
    }
    return out;
}

std::string replace_underscores(std::string s) {
    std::replace(s.begin(), s.end(), '_', ' ');
    return s;
}

std::string render_markdown(const Json& doc) {
    const std::string cls = doc["space"]["class"]["name"];
    std::ostringstream out;
    out << "# Feature context report\n\n";
    out << "- mode: " << doc["mode"].get<std::string>() << "\n";
    out << "- input: " << source_text(doc) << "\n";
    out << "- class: " << marginal_text(doc, cls) << "\n";
    out << "- comparison: " << comparison_text(doc["config"]["comparison"]) << "\n";
    out << "- search: " << search_text(doc["config"]["budget"]) << "\n\n";
    out << "| feature | relevance | label | α | β |\n";
    out << "|---|---|---|---|---|\n";
    for (const Json& f : doc["features"]) {
        out << "| " << f["name"].get<std::string>() << " | " << replace_underscores(f["relevance"]) << " | "
            << replace_underscores(f["label"]) << " | " << size_cell(f["alpha"], f["alpha_exact"], "≤") << " | "
            << size_cell(f["beta"], f["beta_exact"], "≥") << " |\n";
    }
    out << "\n## Sensitivity\n\n";
    if (doc["edges"].empty()) {
        out << "No weakly context-sensitive pairs.\n";
    }
    for (const Json& e : doc["edges"]) {
        out << "- " << e["i"].get<std::string>() << " ~ " << e["j"].get<std::string>()
            << ": weak; strong: " << strong_text(e, "→") << "\n";
        if (!e["witness"].is_null()) {
            out << "  - " << edge_line(e, cls) << "\n";
        }
    }
    out << "\n## Witnesses\n\n";
    bool any = false;
    for (const Json& f : doc["features"]) {
        for (const char* key : {"alpha_witness", "beta_witness"}) {
            if (f[key].is_null() || (key == std::string("beta_witness") && f["beta_witness"] == f["alpha_witness"])) {
                continue;
            }
            any = true;
            out << "- " << f["name"].get<std::string>() << " (" << (key[0] == 'a' ? "α" : "β")
                << "): " << witness_line(f[key], cls) << "\n";
        }
    }
    if (!any) {
        out << "No witnesses.\n";
    }
    if (!doc["warnings"].empty()) {
        out << "\n## Warnings\n\n";
        for (const Json& w : doc["warnings"]) {
            out << "- " << w.get<std::string>() << "\n";
        }
    }
    return out.str();
}

std::string pad(const std::string& s, std::size_t width) {
    // width in code points
    std::size_t visible = 0;
    for (unsigned char c : s) {
        visible += (c & 0xC0U) != 0x80U;
    }
    return s + std::string(width > visible ? width - visible : 0, ' ');
}

std::string render_text(const Json& doc) {
    const std::string cls = doc["space"]["class"]["name"];
    std::ostringstream out;
    out << "mode:       " << doc["mode"].get<std::string>() << "\n";
    out << "input:      " << source_text(doc) << "\n";
    out << "class:      " << marginal_text(doc, cls) << "\n";
    out << "comparison: " << comparison_text(doc["config"]["comparison"]) << "\n";
    out << "search:     " << search_text(doc["config"]["budget"]) << "\n\n";
    std::size_t name_width = 7;
    for (const Json& f : doc["features"]) {
        name_width = std::max(name_width, f["name"].get<std::string>().size());
    }
    out << pad("feature", name_width + 2) << pad("relevance", 19) << pad("label", 12) << pad("alpha", 7) << "beta\n";
    for (const Json& f : doc["features"]) {
        out << pad(f["name"], name_width + 2) << pad(f["relevance"], 19) << pad(f["label"], 12)
            << pad(size_cell(f["alpha"], f["alpha_exact"], "<="), 7) << size_cell(f["beta"], f["beta_exact"], ">=")
            << "\n";
    }
    out << "\nsensitivity:\n";
    if (doc["edges"].empty()) {
        out << "  none\n";
    }
    for (const Json& e : doc["edges"]) {
        out << "  " << e["i"].get<std::string>() << " ~ " << e["j"].get<std::string>()
            << "  strong: " << strong_text(e, "->") << "\n";
        if (!e["witness"].is_null()) {
            out << "    " << edge_line(e, cls) << "\n";
        }
    }
    out << "\nwitnesses:\n";
    for (const Json& f : doc["features"]) {
        if (!f["relevance_witness"].is_null()) {
            out << "  " << f["name"].get<std::string>() << ": " << witness_line(f["relevance_witness"], cls) << "\n";
        }
    }
    for (const Json& w : doc["warnings"]) {
        out << "warning: " << w.get<std::string>() << "\n";
    }
    return out.str();
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
    if (name == "json") {
        return ReportFormat::Json;
    }
    if (name == "md" || name == "markdown") {
        return ReportFormat::Markdown;
    }
    if (name == "text" || name == "txt") {
        return ReportFormat::Text;
    }
    fail(ErrorKind::Usage, "unknown format '" + std::string(name) + "' (expected json, md or text)");
}

std::string report_to_json(const AnalysisReport& r) {
    const FeatureSpace& space = r.space;
    Json doc;
    doc["schema"] = kReportSchema;
    doc["version"] = kReportVersion;
    doc["mode"] = mode_name(r.config.mode);
    doc["source"] = r.source == Distribution::Source::Counts ? "counts" : "exact";
    doc["total"] = r.total;

    Json features = Json::array();
    for (std::size_t f = 0; f < space.feature_count(); ++f) {
        features.push_back({{"name", space.feature_name(f)}, {"domain", space.domain(f)}});
    }
    doc["space"] = {{"features", std::move(features)},
                    {"class", {{"name", space.class_name()}, {"domain", space.class_domain()}}}};

    Json marginal = Json::array();
    for (std::size_t y = 0; y < r.class_marginal.size(); ++y) {
        marginal.push_back({{"class", space.class_domain()[y]}, {"p", to_fraction_string(r.class_marginal[y])}});
    }
    doc["class_marginal"] = std::move(marginal);

    const ComparisonConfig& c = r.config;
    doc["config"] = {
        {"comparison",
         {{"mode", mode_name(c.mode)},
          {"epsilon", c.confidence ? Json() : Json(to_fraction_string(c.epsilon))},
          {"min_support", c.min_support},
          {"confidence", optional_json(c.confidence)},
          {"bonferroni", c.bonferroni},
          {"comparison_count", c.comparison_count}}},
        {"budget",
         {{"exact_limit", r.budget.exact_limit},
          {"max_context_size", r.budget.max_context_size},
          {"beam_width", r.budget.beam_width},
          {"random_probes", r.budget.random_probes},
          {"seed", r.budget.seed}}}};

    Json profiles = Json::array();
    for (const ContextProfile& p : r.profiles) {
        Json table = Json::array();
        for (const ConditionalCell& cell : p.class_given_value) {
            table.push_back({{"value", space.domain(p.feature)[cell.values[0]]},
                             {"class", space.class_domain()[cell.y]},
                             {"p", to_fraction_string(cell.p)},
                             {"support", cell.support}});
        }
        profiles.push_back({{"index", p.feature},
                            {"name", space.feature_name(p.feature)},
                            {"relevance", std::string(to_string(p.relevance.relevance))},
                            {"label", std::string(to_string(p.label))},
                            {"alpha", optional_json(p.alpha)},
                            {"beta", optional_json(p.beta)},
                            {"alpha_exact", p.alpha_exact},
                            {"beta_exact", p.beta_exact},
                            {"exact", p.relevance.exact},
                            {"contexts_evaluated", p.contexts_evaluated},
                            {"insufficient_support", p.insufficient_support},
                            {"relevance_witness", witness_json(space, p.relevance.witness)},
                            {"alpha_witness", witness_json(space, p.alpha_witness)},
                            {"beta_witness", witness_json(space, p.beta_witness)},
                            {"class_given_value", std::move(table)}});
    }
    doc["features"] = std::move(profiles);

    Json edges = Json::array();
    for (const SensitivityEdge& e : r.edges) {
        edges.push_back(sensitivity_json(space, e));
    }
    doc["edges"] = std::move(edges);
    doc["pairs_exhaustive"] = r.pairs_exhaustive;
    doc["warnings"] = r.warnings;
    doc["provenance"] = {{"input_digest", r.input_digest},
                         {"seed", r.budget.seed},
                         {"tool_version", std::string(tool_version())},
                         {"manifest", manifest_json(r.manifest)}};
    return doc.dump(2) + "\n";
}

void validate_report_json(std::string_view json_text) { parse(json_text); }

std::string render_report(std::string_view json_text, ReportFormat format) {
    const Json doc = parse(json_text);
    switch (format) {
        case ReportFormat::Json:
            return doc.dump(2) + "\n";
        case ReportFormat::Markdown:
            return render_markdown(doc);
        case ReportFormat::Text:
            return render_text(doc);
    }
    return {};
}

}  // namespace ctxscope
