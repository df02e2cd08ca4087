#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <openssl/evp.h>

#include "pidgraph/error.hpp"
#include "pidgraph/image_io.hpp"
#include "pidgraph/json_util.hpp"
#include "pidgraph/result.hpp"
#include "pidgraph/synth.hpp"

namespace pidgraph {

inline constexpr const char* kManifestSchema = "pid-corpus/1";

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        throw RenderError("SHA-256 computation failed");
    std::string hex;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

inline std::string sha256_file(const std::string& path) { return sha256_hex(read_text_file(path)); }

// Half-open seed range; an empty range yields a manifest with no sheets.
struct SeedRange {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::size_t size() const { return end > begin ? end - begin : 0; }
};

// "A:B" for seeds A..B-1, or a single seed "A".
inline SeedRange parse_seed_range(const std::string& text) {
    auto number = [&](const std::string& s) -> std::uint32_t {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 9)
            throw ParameterError("bad seed range '" + text + "'");
        return static_cast<std::uint32_t>(std::stoul(s));
    };
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const std::uint32_t s = number(text);
        return {s, s + 1};
    }
    SeedRange r{number(text.substr(0, colon)), number(text.substr(colon + 1))};
    if (r.end < r.begin) throw ParameterError("seed range '" + text + "' ends before it begins");
    return r;
}

inline std::string sheet_stem(std::uint32_t seed) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "sheet_%05u", seed);
    return buf;
}

struct CorpusFile {
    std::string name;
    std::string sha256;
};

// Writes image, ground truth, the transcribed text regions and the true
// symbol boxes for one seed; returns the files in write order.
inline std::vector<CorpusFile> write_sheet(const SheetSpec& spec, std::uint32_t seed, const std::filesystem::path& dir) {
    const Sheet sheet = generate_sheet(spec, seed);
    const std::string stem = sheet_stem(seed);
    std::vector<CorpusFile> files;
    auto record = [&](const std::string& name) { files.push_back({name, sha256_file((dir / name).string())}); };

    write_gray((dir / (stem + ".png")).string(), sheet.image);
    record(stem + ".png");
    write_text_file((dir / (stem + ".json")).string(), serialize(sheet.truth));
    record(stem + ".json");
    write_text_file((dir / (stem + ".text.json")).string(), text_regions_to_json(sheet.text).dump(2) + "\n");
    record(stem + ".text.json");
    write_text_file((dir / (stem + ".symbols.json")).string(),
                    symbol_detections_to_json(sheet.truth.symbols).dump(2) + "\n");
    record(stem + ".symbols.json");
    return files;
}

// Runs `work(i)` for i in [0, n) on up to `jobs` threads. The exception of
// the lowest failing index is rethrown after every worker has stopped.
template <class Work>
void parallel_for(std::size_t n, int jobs, Work work) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                work(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// The manifest lists files in seed order whatever the scheduling.
inline Json write_corpus(const SheetSpec& spec, SeedRange seeds, const std::filesystem::path& dir, int jobs = 1) {
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw RenderError("cannot create directory " + dir.string() + ": " + ec.message());

    std::vector<std::vector<CorpusFile>> per_seed(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        per_seed[i] = write_sheet(spec, seeds.begin + static_cast<std::uint32_t>(i), dir);
    });

    Json sheets = Json::array();
    for (std::size_t i = 0; i < per_seed.size(); ++i) {
        Json files = Json::array();
        for (const auto& f : per_seed[i]) files.push_back({{"name", f.name}, {"sha256", f.sha256}});
        sheets.push_back({{"seed", seeds.begin + i}, {"files", std::move(files)}});
    }
    Json manifest{{"schema", kManifestSchema},
                  {"spec", spec_to_json(spec)},
                  {"seeds", {seeds.begin, seeds.end}},
                  {"sheets", std::move(sheets)}};
    write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    return manifest;
}

} // namespace pidgraph
