#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include <unistd.h>

#include "pidgraph/config.hpp"
#include "pidgraph/result.hpp"
#include "pidgraph/synth.hpp"

using namespace pidgraph;

namespace {

Json truth_json(std::uint32_t seed = 2) {
    SheetSpec spec;
    spec.junctions = 1;
    return result_to_json(generate_sheet(spec, seed).truth);
}

// Index of the failing record, or -2 when nothing was thrown.
int schema_record(const Json& doc) {
    try {
        result_from_json(doc, "doc");
    } catch (const SchemaError& e) {
        return e.record();
    }
    return -2;
}

} // namespace

TEST(ResultJson, RoundTripIsByteIdentical) {
    const Json j = truth_json();
    const Result r = result_from_json(j, "doc");
    EXPECT_EQ(result_to_json(r), j);
    EXPECT_EQ(serialize(r), serialize(result_from_json(parse_json(serialize(r), "text"), "text")));
}

TEST(ResultJson, GroundTruthFlagOnlyWhenSet) {
    Result r;
    r.width = 10;
    r.height = 10;
    EXPECT_FALSE(result_to_json(r).contains("ground_truth"));
    r.ground_truth = true;
    EXPECT_EQ(result_to_json(r)["ground_truth"], true);
    EXPECT_EQ(result_to_json(r)["schema"], kResultSchema);
}

TEST(ResultJson, RealsUseFixedPrecision) {
    Result r;
    r.width = r.height = 10;
    r.segments.push_back({0, {1.0 / 3.0, 0}, {2.0 / 3.0, 1e-9}});
    const std::string s = serialize(r);
    EXPECT_NE(s.find("0.333"), std::string::npos);
    EXPECT_EQ(s.find("0.3333"), std::string::npos);
}

TEST(ResultJson, SchemaErrorsNameTheRecord) {
    Json j = truth_json();
    j["schema"] = "other/1";
    EXPECT_EQ(schema_record(j), -1);

    j = truth_json();
    j["associations"][1]["line"] = 99;
    EXPECT_EQ(schema_record(j), 1);

    j = truth_json();
    j["codes"][2]["bbox"] = Json::array({10, 10, 5, 20});
    EXPECT_EQ(schema_record(j), 2);

    j = truth_json();
    j["tags"][0]["vertices"].erase(0);
    EXPECT_EQ(schema_record(j), 0);

    j = truth_json();
    j["segments"][3]["id"] = 7;
    EXPECT_EQ(schema_record(j), 3);

    j = truth_json();
    j["forest"]["trees"][1]["nodes"][1]["parent"] = 5;
    EXPECT_EQ(schema_record(j), 1);

    j = truth_json();
    j.erase("forest");
    EXPECT_EQ(schema_record(j), -1);
}

TEST(ResultJson, MalformedTextReportsPosition) {
    try {
        parse_json("{\n  \"a\": [1,\n}", "broken.json");
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("broken.json:3"), std::string::npos) << e.what();
    }
}

TEST(Config, DefaultsRoundTrip) {
    const PipelineConfig d;
    const Json j = config_to_json(d);
    EXPECT_EQ(config_to_json(config_from_json(j, "cfg")), j);
    EXPECT_EQ(j["tags"]["probe_kernel"], 21);
    EXPECT_EQ(j["lines"]["junction_kernel"], 21);
    EXPECT_EQ(j["symbols"]["threshold"], 0.8);
    EXPECT_EQ(j["annotation"]["patch_size"], 400);
}

TEST(Config, PartialOverridesAndErrors) {
    const PipelineConfig c = config_from_json(Json{{"lines", {{"votes", 30}}}, {"flow", {{"tag_max_dist", 12}}}}, "cfg");
    EXPECT_EQ(c.hough.votes, 30);
    EXPECT_EQ(c.association.tag_max_dist, 12);
    EXPECT_EQ(c.hough.min_length, PipelineConfig{}.hough.min_length);
    EXPECT_THROW(config_from_json(Json{{"lines", {{"vote", 30}}}}, "cfg"), SchemaError);
    EXPECT_THROW(config_from_json(Json{{"extras", {}}}, "cfg"), SchemaError);
    EXPECT_THROW(config_from_json(Json{{"lines", {{"votes", 2.5}}}}, "cfg"), SchemaError);
    EXPECT_THROW(config_from_json(Json{{"tags", {{"apex_side", "UP"}}}}, "cfg"), SchemaError);
}

TEST(Config, ExplicitPathBeatsEnvironment) {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string a = (dir / ("pidgraph_cfg_a_" + std::to_string(::getpid()) + ".json")).string();
    const std::string b = (dir / ("pidgraph_cfg_b_" + std::to_string(::getpid()) + ".json")).string();
    write_text_file(a, R"({"lines": {"votes": 11}})");
    write_text_file(b, R"({"lines": {"votes": 22}})");
    ::unsetenv(kConfigEnv);
    EXPECT_EQ(load_config(std::nullopt).hough.votes, PipelineConfig{}.hough.votes);
    ::setenv(kConfigEnv, b.c_str(), 1);
    EXPECT_EQ(load_config(std::nullopt).hough.votes, 22);
    EXPECT_EQ(load_config(a).hough.votes, 11);
    ::unsetenv(kConfigEnv);
    EXPECT_THROW(load_config(std::string("/nonexistent/cfg.json")), InputError);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}
