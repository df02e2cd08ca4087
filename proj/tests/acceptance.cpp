// One line per acceptance criterion: PASS/FAIL, name, measured values and
// wall time. Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "flow_cases.hpp"
#include "oracles.hpp"
#include "pidgraph/annotation.hpp"
#include "pidgraph/corpus.hpp"
#include "pidgraph/draw.hpp"
#include "pidgraph/metrics.hpp"
#include "pidgraph/pipeline.hpp"
#include "pidgraph/polyline.hpp"
#include "pidgraph/synth.hpp"

using namespace pidgraph;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const char* name, double limit_seconds, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < limit_seconds;
    const bool ok = v.pass && in_time;
    failures += !ok;
    std::printf("%s  %-34s %s; %.3f s (limit %.0f s)%s\n", ok ? "PASS" : "FAIL", name, v.detail.c_str(), secs,
                limit_seconds, in_time ? "" : " TIME EXCEEDED");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---- metric arithmetic ----------------------------------------------------

Verdict metric_arithmetic() {
    struct Row {
        long long s, t, reference_tenths, tolerance;
    };
    // Reference accuracies in tenths of a percent; the 14/21 row is printed
    // 0.2 below its exact value, hence the wider tolerance.
    const Row rows[] = {{64, 71, 901, 1}, {47, 72, 652, 1}, {21, 21, 1000, 1}, {32, 32, 1000, 1},
                        {41, 64, 640, 1}, {14, 21, 665, 2}, {31, 32, 968, 1}};
    bool ok = true;
    std::string got;
    for (const auto& r : rows) {
        Evaluation ev;
        ev.rows = {{"row", {r.s, r.t}}};
        const std::string table = evaluation_table(ev);
        const std::string printed = Ratio{r.s, r.t}.percent();
        ok &= table.find(printed + "%") != std::string::npos;
        const long long tenths = percent_tenths(r.s, r.t);
        ok &= std::llabs(tenths - r.reference_tenths) <= r.tolerance;
        got += (got.empty() ? "" : " ") + printed;
    }
    return {ok, "printed " + got};
}

// ---- confusion matrix -> per-class scores --------------------------------

Verdict confusion_to_scores() {
    SymbolConfusion m;
    m.cells = {{{74, 2, 0, 0, 0, 0, 0, 4, 0, 0, 0},
                {0, 64, 0, 0, 4, 0, 0, 0, 0, 0, 0},
                {0, 0, 25, 0, 0, 0, 0, 0, 0, 0, 0},
                {0, 0, 0, 294, 0, 0, 0, 0, 0, 0, 0},
                {0, 0, 0, 0, 38, 0, 0, 0, 0, 0, 0},
                {0, 0, 0, 0, 0, 41, 0, 0, 0, 1, 0},
                {0, 0, 0, 0, 0, 8, 36, 0, 0, 3, 0},
                {5, 0, 0, 3, 0, 0, 0, 64, 0, 0, 0},
                {0, 0, 0, 0, 0, 0, 0, 0, 261, 0, 0},
                {0, 0, 0, 0, 0, 0, 0, 0, 0, 52, 0},
                {0, 0, 3, 0, 0, 0, 0, 0, 4, 0, 149}}};
    // Reference per-class (precision, recall, f1). Its "precision" column is
    // the row-normalized diagonal and "recall" the column-normalized one.
    const double reference[11][3] = {{0.925, 0.936, 0.931}, {0.941, 0.969, 0.955}, {1, 0.893, 0.944},
                                     {1, 0.989, 0.995},     {1, 0.905, 0.95},      {0.976, 0.837, 0.901},
                                     {0.766, 1, 0.867},     {0.888, 0.941, 0.914}, {1, 0.985, 0.992},
                                     {1, 0.929, 0.963},     {0.955, 1, 0.977}};
    double worst = 0.0;
    int within = 0;
    for (int c = 0; c < kSymbolClassCount; ++c) {
        const ClassScores s = m.scores(c);
        const double ours[3] = {s.recall, s.precision, s.f1};
        for (int k = 0; k < 3; ++k) {
            const double err = std::abs(ours[k] - reference[c][k]);
            worst = std::max(worst, err);
            within += err <= 0.001;
        }
    }
    return {within == 33, std::to_string(within) + "/33 entries within 0.001, worst " + fmt("%.4f", worst)};
}

// ---- synthetic end to end -------------------------------------------------

Verdict synthetic_end_to_end() {
    const SheetSpec spec;
    DetectionScore tags, codes, segs;
    int forests = 0, sheets = 0, lines = 0, symbols = 0;
    for (std::uint32_t seed = 0; seed < 50; ++seed) {
        const Sheet s = generate_sheet(spec, seed);
        ExtractInputs in;
        in.text = s.text;
        const Result r = extract(s.image, PipelineConfig{}, in);
        const Evaluation ev = evaluate(r, s.truth, {0.7, 3.0});
        for (auto [acc, part] : {std::pair{&tags, &ev.tags}, {&codes, &ev.codes}, {&segs, &ev.segments}}) {
            acc->matched += part->matched;
            acc->truth += part->truth;
            acc->predicted += part->predicted;
        }
        forests += ev.forest_equal;
        lines += int(s.truth.segments.size());
        symbols += int(s.truth.symbols.size());
        ++sheets;
    }
    const bool ok = tags.precision() == 1.0 && tags.recall() == 1.0 && codes.precision() == 1.0 &&
                    codes.recall() == 1.0 && segs.recall() >= 0.95 && forests * 10 >= sheets * 9;
    return {ok, std::to_string(sheets) + " sheets (" + std::to_string(lines) + " lines, " + std::to_string(symbols) +
                    " symbols); tag P/R " + fmt("%.3f", tags.precision()) + "/" + fmt("%.3f", tags.recall()) +
                    ", code P/R " + fmt("%.3f", codes.precision()) + "/" + fmt("%.3f", codes.recall()) +
                    ", segment recall " + fmt("%.3f", segs.recall()) + ", forests " + std::to_string(forests) + "/" +
                    std::to_string(sheets)};
}

// ---- junction validation vs pixel-crossing oracle -------------------------

Verdict junction_oracle() {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> tilt(-30.0, 30.0), jitter(-2.0, 2.0), gap(14.0, 20.0);
    std::uniform_int_distribution<int> kind_of(0, 2), thick(1, 3), coin(0, 1);
    const double deg = std::acos(-1.0) / 180.0;
    int agree = 0, constructed = 0, counts[3] = {0, 0, 0};
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        const int kind = kind_of(rng); // 0 cross, 1 tee, 2 broken crossing
        ++counts[kind];
        BinaryImage img(61, 61);
        const Point c{30.5 + jitter(rng), 30.5 + jitter(rng)};
        const double a1 = (tilt(rng) + (coin(rng) ? 90.0 : 0.0)) * deg;
        const double a2 = a1 + (90.0 + tilt(rng)) * deg;
        const Point u{std::cos(a1), std::sin(a1)}, v{std::cos(a2), std::sin(a2)};
        const double t = thick(rng);
        draw_segment(img, c - u * 40.0, c + u * 40.0, t);
        if (kind == 0) draw_segment(img, c - v * 40.0, c + v * 40.0, t);
        if (kind == 1) draw_segment(img, c, c + v * (coin(rng) ? 40.0 : -40.0), t);
        if (kind == 2) {
            const double g = gap(rng);
            draw_segment(img, c + v * g, c + v * 40.0, t);
            draw_segment(img, c - v * g, c - v * 40.0, t);
        }
        Junction cand;
        cand.at = c;
        const Junction got = validate_intersection(img, cand, 21);

        const auto edges = oracle::square_edges(int(std::lround(c.x)), int(std::lround(c.y)), 10);
        int arms = 0;
        bool same = true;
        for (int e = 0; e < 4; ++e) {
            const int runs = oracle::runs_along(img, edges[e]);
            same &= got.crossings[e] == runs;
            arms += runs > 0;
        }
        same &= got.arm_count == arms && got.valid == (arms >= 3);
        agree += same;
        constructed += got.valid == (kind != 2);
    }
    return {agree == n, std::to_string(agree) + "/" + std::to_string(n) + " agree (" + std::to_string(counts[0]) +
                            " crosses, " + std::to_string(counts[1]) + " tees, " + std::to_string(counts[2]) +
                            " broken); construction labels " + std::to_string(constructed) + "/" + std::to_string(n)};
}

// ---- forest invariants ----------------------------------------------------

Verdict forest_suite() {
    std::mt19937 rng(20261016);
    int ok_graphs = 0, cyclic = 0;
    const int n = 500;
    for (int trial = 0; trial < n; ++trial) {
        const auto c = oracle::random_flow_case(rng);
        ForestReport rep;
        const FlowForest f = prune_forest(build_forest(c.tags, c.links, c.junctions, &rep), &rep);
        for (const auto& w : rep.warnings) cyclic += w.find("also reachable") != std::string::npos;
        bool ok = !check_forest(f, &c.tags).has_value();
        const FlowForest again = prune_forest(f);
        ok &= again.trees.size() == f.trees.size();
        for (std::size_t i = 0; ok && i < f.trees.size(); ++i)
            ok &= again.trees[i].nodes == f.trees[i].nodes && again.trees[i].parent == f.trees[i].parent;
        for (std::size_t t = 0; ok && t < c.tags.size(); ++t) {
            if (c.tags[t].kind != TagKind::Outlet) continue;
            const auto expect = oracle::reachable_inlets(c, int(t));
            const FlowTree* tree = f.find(int(t));
            std::set<int> leaves;
            if (tree)
                for (const auto& node : tree->nodes)
                    if (node.kind == NodeKind::InletLeaf) leaves.insert(node.ref);
            ok &= expect.empty() ? tree == nullptr : leaves == expect;
        }
        ok_graphs += ok;
    }
    return {ok_graphs == n, std::to_string(ok_graphs) + "/" + std::to_string(n) + " graphs (" + std::to_string(cyclic) +
                                " loop-closing edges seen)"};
}

// ---- geometry -------------------------------------------------------------

bool inside_polygon(Point p, const std::vector<Point>& poly) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        if ((poly[i].y > p.y) != (poly[j].y > p.y) &&
            p.x < (poly[j].x - poly[i].x) * (p.y - poly[i].y) / (poly[j].y - poly[i].y) + poly[i].x)
            in = !in;
    return in;
}

std::size_t rdp_vertices(const std::vector<Point>& poly) {
    BinaryImage img(200, 120);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) img.set(x, y, inside_polygon({double(x), double(y)}, poly));
    const auto contours = extract_contours(img);
    if (contours.size() != 1) return 0;
    return simplify_rdp(contours[0], 0.02 * contours[0].perimeter()).points.size();
}

Verdict geometry_properties() {
    const std::size_t square = rdp_vertices({{20, 20}, {80, 20}, {80, 80}, {20, 80}});
    const std::size_t pentagon = rdp_vertices({{20, 30}, {110, 30}, {140, 60}, {110, 90}, {20, 90}});
    Polyline straight{{}, false};
    for (int i = 0; i <= 40; ++i) straight.points.push_back({2.0 * i, 0.75 * i});
    const std::size_t line = simplify_rdp(straight, 1.0).points.size();

    const auto x = compute_intersections({{0, {0, 0}, {10, 10}}, {1, {0, 10}, {10, 0}}});
    const bool exact = x.size() == 1 && x[0].at.x == 5.0 && x[0].at.y == 5.0;

    // Pairs whose infinite lines meet more than 2 px beyond one finite
    // segment, judged with the parametric (Cramer) solution.
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> coord(0.0, 100.0);
    int rejected = 0, pairs = 0;
    while (pairs < 100) {
        const Point a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)}, c{coord(rng), coord(rng)},
            d{coord(rng), coord(rng)};
        const double a11 = b.x - a.x, a12 = c.x - d.x, a21 = b.y - a.y, a22 = c.y - d.y;
        const double det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-6) continue;
        const double r1 = c.x - a.x, r2 = c.y - a.y;
        const double t = (r1 * a22 - a12 * r2) / det, u = (a11 * r2 - r1 * a21) / det;
        const double len1 = std::hypot(a11, a21), len2 = std::hypot(a12, a22);
        const double beyond = std::max({-t * len1, (t - 1) * len1, -u * len2, (u - 1) * len2});
        if (beyond <= 2.0) continue;
        ++pairs;
        rejected += compute_intersections({{0, a, b}, {1, c, d}}).empty();
    }
    const bool ok = square == 4 && pentagon == 5 && line == 2 && exact && rejected == pairs;
    return {ok, "RDP vertices square " + std::to_string(square) + ", pentagon " + std::to_string(pentagon) +
                    ", straight " + std::to_string(line) + "; X-intersection " +
                    (x.empty() ? std::string("none") : fmt("(%g,", x[0].at.x) + fmt("%g)", x[0].at.y)) +
                    "; finite-extent rejections " + std::to_string(rejected) + "/" + std::to_string(pairs)};
}

// ---- annotation tooling ---------------------------------------------------

std::string digest(const std::vector<Patch>& patches) {
    std::string bytes;
    for (const auto& p : patches) {
        bytes += std::to_string(p.ox) + "," + std::to_string(p.oy) + ";";
        bytes.append(p.image.pixels().begin(), p.image.pixels().end());
        if (p.annotation) bytes.append(p.annotation->pixels().begin(), p.annotation->pixels().end());
    }
    return sha256_hex(bytes);
}

Verdict annotation_tooling() {
    int passed = 0, total = 0;
    auto check = [&](bool b) {
        ++total;
        passed += b;
    };
    // Tiling.
    check(tile_sheet(GrayImage(800, 800)).size() == 4);
    GrayImage big(900, 900, 7);
    const auto nine = tile_sheet(big);
    check(nine.size() == 9 && nine[8].ox == 800 && nine[8].oy == 800 && nine[8].image.at(99, 99) == 7 &&
          nine[8].image.at(100, 100) == 255);
    const auto one = tile_sheet(GrayImage(400, 400));
    check(one.size() == 1 && one[0].ox == 0 && one[0].oy == 0);

    // Boundaries: mask minus its erosion, then dilated, from the explicit oracle.
    BinaryImage square(40, 40);
    fill_box(square, {10, 10, 29, 29});
    const BinaryImage eroded = oracle::erode(square, 3);
    BinaryImage ring(40, 40);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) ring.set(x, y, square.at(x, y) && !eroded.at(x, y));
    const BinaryImage outline = export_mask_boundaries(square);
    check(outline == oracle::dilate(ring, 3));
    int thickness = 0;
    for (int x = 0; x < 40; ++x) thickness += outline.at(x, 20) && x < 20;
    check(thickness == 3);
    check(export_mask_boundaries(BinaryImage(12, 12)).empty());
    BinaryImage dot(9, 9), block(9, 9);
    dot.set(4, 4, true);
    fill_box(block, {3, 3, 5, 5});
    check(export_mask_boundaries(dot) == block);

    // Augmentation.
    GrayImage img(400, 400, 255);
    BinaryImage mask(400, 400);
    fill_box(mask, {50, 110, 80, 130});
    for (int y = 0; y < 400; ++y)
        for (int x = 0; x < 400; ++x)
            if (mask.at(x, y)) img.set(x, y, 0);
    const auto patches = tile_sheet(img, {}, &mask);
    AnnotationConfig cfg;
    check(digest(augment_patches(patches, cfg, 1)) == digest(patches));
    cfg.rotate = cfg.translate = true;
    const auto first = augment_patches(patches, cfg, 42);
    check(first.size() == 9);
    const std::string d1 = digest(first), d2 = digest(augment_patches(patches, cfg, 42));
    check(d1 == d2);
    return {passed == total, std::to_string(passed) + "/" + std::to_string(total) +
                                 " examples; augmentation checksum " + d1.substr(0, 16) + " on both runs"};
}

} // namespace

int main() {
    criterion("metric arithmetic (reference rows)", 1, metric_arithmetic);
    criterion("confusion -> per-class scores", 1, confusion_to_scores);
    criterion("synthetic end-to-end (50 sheets)", 60, synthetic_end_to_end);
    criterion("junction validation vs oracle", 10, junction_oracle);
    criterion("forest invariants (500 graphs)", 30, forest_suite);
    criterion("geometry properties", 5, geometry_properties);
    criterion("annotation tooling", 5, annotation_tooling);
    std::printf("%d criterion(s) failed\n", failures);
    return failures ? 1 : 0;
}
