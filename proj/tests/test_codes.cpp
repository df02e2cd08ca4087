#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "pidgraph/codes.hpp"

using namespace pidgraph;

namespace {

std::string temp_file(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / ("pidgraph_codes_" + name);
    std::ofstream(path) << body;
    return path.string();
}

void fill(BinaryImage& img, BBox b) {
    for (int y = b.y0; y <= b.y1; ++y)
        for (int x = b.x0; x <= b.x1; ++x) img.set(x, y, true);
}

} // namespace

TEST(ValidateCode, DefaultGrammarInstances) {
    const CodeGrammar g;
    EXPECT_TRUE(validate_code("6\"-PP1234567-12345A-AB", g));
    EXPECT_FALSE(validate_code("ABC-123", g));
    EXPECT_FALSE(validate_code("66\"-PP1234567-12345A-AB", g));
}

TEST(ValidateCode, TrimAndCase) {
    const CodeGrammar g;
    EXPECT_TRUE(validate_code("  6\"-pp1234567-12345a-ab\t", g));
    EXPECT_FALSE(validate_code("6\"-P11234567-12345A-AB", g));
    EXPECT_FALSE(validate_code("6'-PP1234567-12345A-AB", g));
}

TEST(ValidateCode, CustomGrammarAndInvalidPatterns) {
    const CodeGrammar g("AA-NN");
    EXPECT_TRUE(validate_code("xY-09", g));
    EXPECT_FALSE(validate_code("xY-0A", g));
    EXPECT_THROW(CodeGrammar(""), ParameterError);
    EXPECT_THROW(CodeGrammar("N\tN"), ParameterError);
}

TEST(FilterCodes, KeepsExactlyValidRegions) {
    const CodeGrammar g;
    std::vector<TextRegion> in = {
        {{0, 0, 10, 5}, "6\"-PP1234567-12345A-AB", 0.9},
        {{20, 0, 30, 5}, "NOT A CODE", std::nullopt},
        {{40, 0, 50, 5}, "2\"-XY7654321-00001B-CD", std::nullopt},
        {{60, 0, 70, 5}, std::nullopt, std::nullopt},
    };
    std::vector<int> skipped;
    const auto out = filter_codes(in, g, &skipped);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].bbox, in[0].bbox);
    EXPECT_EQ(out[1].text, "2\"-XY7654321-00001B-CD");
    EXPECT_EQ(skipped, std::vector<int>{3});
    EXPECT_TRUE(filter_codes({}, g).empty());
}

TEST(FilterCodes, GarbledTranscriptionsAreDropped) {
    // 71 regions, 64 transcribed correctly and 7 garbled by one character.
    const CodeGrammar g;
    std::vector<TextRegion> in;
    for (int i = 0; i < 71; ++i) {
        std::string t = "4\"-AB" + std::to_string(1000000 + i) + "-12345C-DE";
        if (i >= 64) t[5] = 'O';
        in.push_back({{0, i, 10, i}, t, std::nullopt});
    }
    EXPECT_EQ(filter_codes(in, g).size(), 64u);
}

TEST(FilterCodes, SubsetAndRetentionProperty) {
    const CodeGrammar g("NA-N");
    const std::string alphabet = "0aZ9-x ";
    std::vector<TextRegion> in;
    // Every string of length 4 over the alphabet.
    for (int code = 0; code < 7 * 7 * 7 * 7; ++code) {
        std::string t;
        for (int k = 0, c = code; k < 4; ++k, c /= 7) t += alphabet[c % 7];
        in.push_back({{0, 0, 1, 1}, t, std::nullopt});
    }
    const auto out = filter_codes(in, g);
    std::size_t valid = 0;
    for (const auto& r : in) valid += validate_code(*r.text, g);
    EXPECT_EQ(out.size(), valid);
    for (const auto& c : out) EXPECT_TRUE(validate_code(c.text, g));
}

TEST(DetectTextBlobs, BlankAndLongLine) {
    BinaryImage img(600, 50);
    EXPECT_TRUE(detect_text_blobs(img).empty());
    fill(img, {50, 20, 549, 21});
    EXPECT_TRUE(detect_text_blobs(img).empty());
}

TEST(DetectTextBlobs, GroupsGlyphsIntoWords) {
    BinaryImage img(300, 100);
    for (int k = 0; k < 5; ++k) fill(img, {20 + 12 * k, 30, 28 + 12 * k, 43});
    fill(img, {82, 30, 83, 33}); // quote-like tick joins the word
    for (int k = 0; k < 3; ++k) fill(img, {200 + 12 * k, 30, 208 + 12 * k, 43});
    fill(img, {150, 80, 151, 81}); // isolated speck below min area
    const auto blobs = detect_text_blobs(img);
    ASSERT_EQ(blobs.size(), 2u);
    EXPECT_EQ(blobs[0].bbox, (BBox{20, 30, 83, 43}));
    EXPECT_EQ(blobs[1].bbox, (BBox{200, 30, 232, 43}));
    EXPECT_FALSE(blobs[0].text.has_value());
}

TEST(IngestTextRegions, ListObjectAndEmpty) {
    const auto three = temp_file("three.json", R"([
        {"bbox":[1,2,30,12],"text":"abc","confidence":0.5},
        {"bbox":[40,2,60,12],"text":null,"confidence":null},
        {"bbox":[70,2,90,12]}
    ])");
    const auto r = ingest_text_regions(three);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(*r[0].text, "abc");
    EXPECT_FALSE(r[1].text.has_value());
    EXPECT_EQ(r[2].bbox, (BBox{70, 2, 90, 12}));
    EXPECT_TRUE(ingest_text_regions(temp_file("empty.json", "[]")).empty());
    EXPECT_EQ(ingest_text_regions(temp_file("obj.json", R"({"schema":"x","regions":[{"bbox":[0,0,1,1]}]})")).size(),
              1u);
}

TEST(IngestTextRegions, Errors) {
    const auto bad = temp_file("bad.json", R"([{"bbox":[0,0,5,5]},{"bbox":[9,0,4,5]}])");
    try {
        ingest_text_regions(bad);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.record(), 1);
        EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos);
    }
    const auto oob = temp_file("oob.json", R"([{"bbox":[0,0,500,5]}])");
    EXPECT_THROW(ingest_text_regions(oob, std::pair{100, 100}), SchemaError);
    const auto syntax = temp_file("syntax.json", "[\n{\"bbox\": [0,0,1,1]\n,,]");
    try {
        ingest_text_regions(syntax);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
    EXPECT_THROW(ingest_text_regions("/nonexistent/x.json"), InputError);
}
