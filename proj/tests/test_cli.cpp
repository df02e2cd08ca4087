#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"

using namespace pidgraph;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = pidgraph::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("pidgraph_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        ::unsetenv(kConfigEnv);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }

    // Corpus of `n` default sheets under dir/corpus.
    void corpus(int n) { ASSERT_EQ(invoke({"synth", "-o", path("corpus"), "--seeds", "0:" + std::to_string(n)}).code, 0); }
    std::string sheet(const std::string& ext) const { return path("corpus/sheet_00000" + ext); }

    fs::path dir;
};

} // namespace

TEST_F(CliTest, ExtractEvalQueryOverlay) {
    corpus(1);
    ASSERT_EQ(invoke({"extract", sheet(".png"), "--sidecars", "-o", path("r.json"), "--overlay", path("o.png")}).code, 0);
    const Outcome ev = invoke({"eval", path("r.json"), sheet(".json"), "--iou", "0.7", "--json", path("m.json")});
    ASSERT_EQ(ev.code, 0) << ev.err;
    EXPECT_NE(ev.out.find("Forest equal: yes"), std::string::npos) << ev.out;
    const Json m = read_json_file(path("m.json"));
    EXPECT_EQ(m["schema"], "pid-graph-eval/1");
    EXPECT_TRUE(m["forest_equal"].get<bool>());

    const Outcome q = invoke({"query", path("r.json"), "--all"});
    ASSERT_EQ(q.code, 0);
    EXPECT_EQ(std::count(q.out.begin(), q.out.end(), '\n'), 4);
    EXPECT_EQ(invoke({"query", path("r.json"), "999"}).code, 4);
    EXPECT_EQ(invoke({"query", path("r.json")}).code, 1);

    const GrayImage over = read_gray(path("o.png"));
    EXPECT_EQ(over.width(), 1400);
    EXPECT_EQ(invoke({"overlay", sheet(".png"), path("r.json"), path("o2.png")}).code, 0);
}

TEST_F(CliTest, ExtractIsByteDeterministic) {
    corpus(1);
    const Outcome a = invoke({"extract", sheet(".png"), "--text-json", sheet(".text.json")});
    const Outcome b = invoke({"extract", sheet(".png"), "--text-json", sheet(".text.json")});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.rfind("{\n  \"schema\": \"pid-graph/1\"", 0), 0u);
}

TEST_F(CliTest, ExtractManyWithJobs) {
    corpus(3);
    std::vector<std::string> args = {"extract", "--sidecars", "-j", "3", "-o", path("out")};
    for (int i = 0; i < 3; ++i) args.push_back(path("corpus/sheet_0000" + std::to_string(i) + ".png"));
    ASSERT_EQ(invoke(args).code, 0);
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(path("out/sheet_0000" + std::to_string(i) + ".result.json")));
}

TEST_F(CliTest, BlankImage) {
    write_gray(path("blank.png"), GrayImage(120, 80, 255));
    const Outcome r = invoke({"extract", path("blank.png")});
    ASSERT_EQ(r.code, 0);
    const Result res = result_from_json(parse_json(r.out, "out"), "out");
    EXPECT_TRUE(res.forest.trees.empty());
    EXPECT_TRUE(res.tags.empty());
    write_text_file(path("blank.json"), r.out);
    const Outcome q = invoke({"query", path("blank.json"), "--all"});
    EXPECT_EQ(q.code, 0);
    EXPECT_TRUE(q.out.empty());
}

TEST_F(CliTest, ExitCodes) {
    corpus(1);
    write_text_file(path("bad.json"), R"([{"bbox": [1, 1, 50, 20], "text": "A"}, {"bbox": [9, 9, 3, 3]}])");
    const Outcome bad = invoke({"extract", sheet(".png"), "--text-json", path("bad.json")});
    EXPECT_EQ(bad.code, 3);
    EXPECT_NE(bad.err.find("record 1"), std::string::npos) << bad.err;

    write_text_file(path("junk.png"), "not an image");
    EXPECT_EQ(invoke({"extract", path("junk.png")}).code, 2);
    EXPECT_EQ(invoke({"eval", path("bad.json"), sheet(".json")}).code, 3);
    EXPECT_EQ(invoke({"eval", path("missing.json"), sheet(".json")}).code, 2);

    write_gray(path("small.png"), GrayImage(50, 40, 255));
    EXPECT_EQ(invoke({"overlay", path("small.png"), sheet(".json"), path("x.png")}).code, 5);
    EXPECT_EQ(invoke({"bogus"}).code, 1);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, ConfigFromEnvironmentAndFlags) {
    corpus(1);
    write_text_file(path("cfg.json"), R"({"codes": {"pattern": "NNN"}})");
    ::setenv(kConfigEnv, path("cfg.json").c_str(), 1);
    Outcome r = invoke({"extract", sheet(".png"), "--sidecars"});
    ::unsetenv(kConfigEnv);
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(result_from_json(parse_json(r.out, "o"), "o").codes.empty());

    r = invoke({"extract", sheet(".png"), "--sidecars", "--config", path("cfg.json"), "--code-pattern",
             std::string(kDefaultCodePattern)});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(result_from_json(parse_json(r.out, "o"), "o").codes.size(), 6u);

    write_text_file(path("broken.json"), R"({"lines": {"nope": 1}})");
    EXPECT_EQ(invoke({"extract", sheet(".png"), "--config", path("broken.json")}).code, 3);
}

TEST_F(CliTest, SynthManifestAndSpec) {
    const Outcome p = invoke({"synth", "--print-spec"});
    ASSERT_EQ(p.code, 0);
    write_text_file(path("spec.json"), p.out);
    ASSERT_EQ(invoke({"synth", "--spec", path("spec.json"), "-o", path("a"), "--seeds", "0:2", "-j", "2"}).code, 0);
    ASSERT_EQ(invoke({"synth", "-o", path("b"), "--seeds", "0:2"}).code, 0);
    EXPECT_EQ(read_text_file(path("a/manifest.json")), read_text_file(path("b/manifest.json")));
    ASSERT_EQ(invoke({"synth", "-o", path("c"), "--seeds", "4:4"}).code, 0);
    EXPECT_TRUE(read_json_file(path("c/manifest.json"))["sheets"].empty());
    write_text_file(path("badspec.json"), R"({"inlets": -1})");
    EXPECT_EQ(invoke({"synth", "--spec", path("badspec.json"), "-o", path("d")}).code, 3);
}

TEST_F(CliTest, TileWritesPatchesAndManifest) {
    GrayImage sheet(500, 300, 255);
    for (int x = 10; x < 490; ++x) sheet.set(x, 150, 0);
    write_gray(path("s.png"), sheet);
    GrayImage mask(500, 300, 255);
    for (int y = 100; y < 200; ++y)
        for (int x = 100; x < 200; ++x) mask.set(x, y, 0);
    write_gray(path("mask.png"), mask);

    ASSERT_EQ(invoke({"tile", path("s.png"), "-o", path("t"), "--patch-size", "200", "--stride", "200", "--mask",
                   path("mask.png"), "--rotate", "--seed", "5"})
                  .code,
              0);
    const Json m = read_json_file(path("t/tiles.json"));
    // 3 x 2 origins, each with 4 rotations.
    EXPECT_EQ(m["patches"].size(), 6u * 5u);
    EXPECT_EQ(m["patches"][0]["file"], "patch_0_0.png");
    EXPECT_EQ(m["patches"][1]["file"], "patch_0_0_v1.png");
    EXPECT_TRUE(fs::exists(path("t/patch_200_200.boundary.png")));
    const GrayImage p = read_gray(path("t/patch_400_0.png"));
    EXPECT_EQ(p.width(), 200);
    EXPECT_EQ(p.at(150, 100), 255); // padding beyond the sheet

    ASSERT_EQ(invoke({"tile", path("s.png"), "-o", path("t2"), "--patch-size", "200", "--stride", "200", "--mask",
                   path("mask.png"), "--rotate", "--seed", "5"})
                  .code,
              0);
    EXPECT_EQ(read_json_file(path("t2/tiles.json"))["patches"], m["patches"]);
    EXPECT_EQ(invoke({"tile", path("s.png"), "-o", path("t3"), "--dilation", "2"}).code, 1);
}
