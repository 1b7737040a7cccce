#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "ctxscope/ctxscope.h"

namespace {

struct Str {
    char* p = nullptr;
    ~Str() { ctxs_string_free(p); }
    std::string s() const { return p ? p : ""; }
};

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "ctxscope_capi_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version and status names") {
    CHECK(std::strlen(ctxs_version()) > 0);
    CHECK(std::string(ctxs_status_name(CTXS_ERR_USAGE)) == "usage error");
    CHECK(std::string(ctxs_status_name(CTXS_OK)) == "ok");
}

TEST_CASE("reference table end to end") {
    ctxs_dist* d = nullptr;
    REQUIRE(ctxs_dist_table2(&d) == CTXS_OK);
    CHECK(ctxs_dist_feature_count(d) == 3);
    ctxs_options* o = nullptr;
    REQUIRE(ctxs_options_new(&o) == CTXS_OK);
    CHECK(ctxs_options_set_threads(o, 1) == CTXS_OK);
    ctxs_report* r = nullptr;
    REQUIRE(ctxs_analyze_dist(d, o, &r) == CTXS_OK);
    Str json;
    REQUIRE(ctxs_report_json(r, &json.p) == CTXS_OK);
    const auto doc = nlohmann::json::parse(json.s());
    CHECK(doc["features"][0]["label"] == "primary");
    CHECK(doc["features"][1]["label"] == "contextual");
    CHECK(doc["features"][2]["label"] == "irrelevant");

    Str md;
    REQUIRE(ctxs_report_render(r, "md", &md.p) == CTXS_OK);
    CHECK(md.s().find("| X2 | strongly relevant | contextual | 1 | 2 |") != std::string::npos);
    Str again;
    REQUIRE(ctxs_render_report_text(json.p, "md", &again.p) == CTXS_OK);
    CHECK(again.s() == md.s());

    ctxs_report_free(r);
    ctxs_options_free(o);
    ctxs_dist_free(d);
}

TEST_CASE("errors carry status and message") {
    ctxs_dist* d = nullptr;
    CHECK(ctxs_dist_parse_csv("X1,Y,p\n0,0,0.5\n", &d) == CTXS_ERR_INPUT);
    CHECK(d == nullptr);
    CHECK(std::strlen(ctxs_last_error()) > 0);
    CHECK(ctxs_dist_load_csv("/nonexistent/x.csv", &d) == CTXS_ERR_IO);
    CHECK(ctxs_dist_table2(nullptr) == CTXS_ERR_USAGE);
    CHECK(ctxs_dist_planted("bogus", 0, 0, &d, nullptr) == CTXS_ERR_USAGE);

    ctxs_options* o = nullptr;
    REQUIRE(ctxs_options_new(&o) == CTXS_OK);
    CHECK(ctxs_options_set_epsilon(o, "abc") == CTXS_ERR_USAGE);
    CHECK(ctxs_options_set_beam(o, 0) == CTXS_ERR_USAGE);
    REQUIRE(ctxs_options_set_epsilon(o, "0.1") == CTXS_OK);
    REQUIRE(ctxs_dist_table2(&d) == CTXS_OK);
    ctxs_report* r = nullptr;
    CHECK(ctxs_analyze_dist(d, o, &r) == CTXS_ERR_USAGE);
    CHECK(r == nullptr);

    Str out;
    CHECK(ctxs_render_report_text("{\"schema\": \"ctxscope-report\"", "md", &out.p) == CTXS_ERR_INPUT);
    CHECK(ctxs_render_report_text("{}", "html", &out.p) == CTXS_ERR_USAGE);
    ctxs_options_free(o);
    ctxs_dist_free(d);
    ctxs_dist_free(nullptr);
}

TEST_CASE("datasets, sampling and empirical analysis") {
    ctxs_dist* d = nullptr;
    REQUIRE(ctxs_dist_table2(&d) == CTXS_OK);
    ctxs_dataset* a = nullptr;
    ctxs_dataset* b = nullptr;
    REQUIRE(ctxs_sample(d, 20000, 1, &a) == CTXS_OK);
    REQUIRE(ctxs_sample(d, 20000, 1, &b) == CTXS_OK);
    CHECK(ctxs_dataset_size(a) == 20000);
    Str ca, cb;
    REQUIRE(ctxs_dataset_to_csv(a, &ca.p) == CTXS_OK);
    REQUIRE(ctxs_dataset_to_csv(b, &cb.p) == CTXS_OK);
    CHECK(ca.s() == cb.s());
    CHECK(ctxs_sample(d, 0, 1, &b) == CTXS_ERR_USAGE);

    const auto path = scratch("data.csv");
    REQUIRE(ctxs_dataset_save_csv(a, path.c_str()) == CTXS_OK);
    ctxs_dataset* loaded = nullptr;
    REQUIRE(ctxs_dataset_load_csv(path.c_str(), &loaded) == CTXS_OK);

    ctxs_options* o = nullptr;
    REQUIRE(ctxs_options_new(&o) == CTXS_OK);
    ctxs_options_set_confidence(o, 0.95);
    ctxs_options_set_min_support(o, 20);
    ctxs_options_set_threads(o, 1);
    const char* args[] = {"--data", "data.csv"};
    REQUIRE(ctxs_options_set_manifest(o, "analyze", args, 2, nullptr) == CTXS_OK);
    ctxs_report* r = nullptr;
    REQUIRE(ctxs_analyze_dataset(loaded, o, &r) == CTXS_OK);
    Str json;
    REQUIRE(ctxs_report_json(r, &json.p) == CTXS_OK);
    const auto doc = nlohmann::json::parse(json.s());
    CHECK(doc["mode"] == "empirical");
    CHECK(doc["config"]["comparison"]["min_support"] == 20);
    CHECK(doc["features"][2]["label"] == "no_witness");
    CHECK(doc["provenance"]["manifest"]["arguments"][1] == "data.csv");
    CHECK(doc["provenance"]["manifest"]["input_digests"][0] == doc["provenance"]["input_digest"]);

    ctxs_options* both = nullptr;
    REQUIRE(ctxs_options_new(&both) == CTXS_OK);
    ctxs_options_set_confidence(both, 0.95);
    ctxs_options_set_epsilon(both, "0.05");
    ctxs_report* bad = nullptr;
    CHECK(ctxs_analyze_dataset(loaded, both, &bad) == CTXS_ERR_USAGE);

    ctxs_options_free(both);
    ctxs_report_free(r);
    ctxs_options_free(o);
    ctxs_dataset_free(loaded);
    ctxs_dataset_free(a);
    ctxs_dataset_free(b);
    ctxs_dist_free(d);
}

TEST_CASE("planted generation with truth") {
    ctxs_dist* d = nullptr;
    Str truth;
    REQUIRE(ctxs_dist_planted("xor:1,irrelevant:2", 7, 1, &d, &truth.p) == CTXS_OK);
    CHECK(ctxs_dist_feature_count(d) == 4);
    const auto doc = nlohmann::json::parse(truth.s());
    CHECK(doc["features"].size() == 4);
    Str digest;
    REQUIRE(ctxs_dist_digest(d, &digest.p) == CTXS_OK);
    CHECK(digest.s().rfind("sha256:", 0) == 0);
    ctxs_dist* dup = nullptr;
    REQUIRE(ctxs_dist_duplicate(d, 0, &dup) == CTXS_OK);
    CHECK(ctxs_dist_feature_count(dup) == 5);
    ctxs_dist_free(dup);
    ctxs_dist_free(d);
}

}  // TEST_SUITE
