#include <gtest/gtest.h>

#include <random>
#include <set>

#include "flow_cases.hpp"
#include "pidgraph/flow.hpp"

using namespace pidgraph;

namespace {

Segment seg(int id, double x0, double y0, double x1, double y1) { return {id, {x0, y0}, {x1, y1}}; }

Tag tag_at(TagKind kind, Point emerge, BBox box) {
    Tag t;
    t.kind = kind;
    t.emerge = emerge;
    t.bbox = box;
    return t;
}

Junction edge(int a, int b, bool valid = true) {
    Junction j;
    j.a = std::min(a, b);
    j.b = std::max(a, b);
    j.valid = valid;
    j.arm_count = valid ? 3 : 2;
    return j;
}

std::set<int> leaves_of(const FlowTree& t) {
    std::set<int> out;
    for (const auto& n : t.nodes)
        if (n.kind == NodeKind::InletLeaf) out.insert(n.ref);
    return out;
}

} // namespace

TEST(Associate, TagPicksNearestLineOnAttachmentSide) {
    // Each side sees only the line on its own side of the tag.
    const std::vector<Segment> segs = {seg(0, 40, 50, 96, 50), seg(1, 194, 52, 300, 52)};
    std::vector<Tag> tags = {tag_at(TagKind::Outlet, {190, 50}, {100, 35, 190, 65})};
    auto r = associate_tags(tags, segs, 30);
    ASSERT_EQ(r.links.size(), 1u);
    EXPECT_EQ(r.links[0].line, 1);

    tags[0].emerge = Point{100, 50}; // attached on the left instead
    r = associate_tags(tags, segs, 30);
    ASSERT_EQ(r.links.size(), 1u);
    EXPECT_EQ(r.links[0].line, 0);
}

TEST(Associate, TagsBeyondRangeOrUnclassifiedAreReported) {
    const std::vector<Segment> segs = {seg(0, 200, 50, 300, 50)};
    std::vector<Tag> tags = {tag_at(TagKind::Inlet, {100, 50}, {10, 35, 100, 65}), Tag{}};
    const auto r = associate_tags(tags, segs, 30);
    EXPECT_TRUE(r.links.empty());
    ASSERT_EQ(r.unassociated.size(), 2u);
    EXPECT_EQ(r.unassociated[1].component, 1);
}

TEST(Associate, EqualDistancesResolveToSmallerId) {
    const std::vector<Segment> segs = {seg(3, 0, 40, 200, 40), seg(1, 0, 60, 200, 60)};
    const std::vector<PipelineCode> codes = {{"X", {50, 45, 80, 55}}};
    const auto r = associate_codes(codes, segs, 30);
    ASSERT_EQ(r.links.size(), 1u);
    EXPECT_EQ(r.links[0].line, 1);
    EXPECT_DOUBLE_EQ(r.links[0].distance, 5.0);
}

TEST(Associate, CodeUsesClosestCorner) {
    const std::vector<Segment> segs = {seg(0, 0, 100, 500, 100)};
    const std::vector<PipelineCode> codes = {{"A", {10, 70, 200, 94}}, {"B", {10, 20, 200, 60}}};
    const auto r = associate_codes(codes, segs, 30);
    ASSERT_EQ(r.links.size(), 1u);
    EXPECT_EQ(r.links[0].component, 0);
    EXPECT_DOUBLE_EQ(r.links[0].distance, 6.0);
    ASSERT_EQ(r.unassociated.size(), 1u);
    EXPECT_EQ(r.unassociated[0].component, 1);
}

TEST(Associate, SymbolGateUsesBoxGap) {
    // Center is 40 px from the line but the box edge touches it.
    const std::vector<Segment> segs = {seg(0, 0, 100, 500, 100)};
    const std::vector<SymbolDetection> syms = {{SymbolClass::Insulation, {50, 40, 130, 120}, 1.0},
                                               {SymbolClass::Insulation, {50, 10, 80, 70}, 1.0}};
    const auto r = associate_symbols(syms, segs, 20);
    ASSERT_EQ(r.links.size(), 1u);
    EXPECT_EQ(r.links[0].component, 0);
    ASSERT_EQ(r.unassociated.size(), 1u);
}

TEST(Forest, ChainWithBranches) {
    // outlet0 -> L0 - L1 - {L2 -> inlet1, L3 -> inlet2}; L4 dangles.
    const std::vector<Tag> tags = {tag_at(TagKind::Outlet, {}, {}), tag_at(TagKind::Inlet, {}, {}),
                                   tag_at(TagKind::Inlet, {}, {})};
    const std::vector<Association> links = {
        {ComponentKind::Tag, 0, 0, 0}, {ComponentKind::Tag, 1, 2, 0}, {ComponentKind::Tag, 2, 3, 0}};
    const std::vector<Junction> js = {edge(0, 1), edge(1, 2), edge(1, 3), edge(1, 4), edge(3, 5, false)};
    ForestReport report;
    const FlowForest raw = build_forest(tags, links, js, &report);
    ASSERT_EQ(raw.trees.size(), 1u);
    EXPECT_EQ(raw.trees[0].nodes.size(), 8u);
    const FlowForest pruned = prune_forest(raw, &report);
    ASSERT_EQ(pruned.trees.size(), 1u);
    const auto& t = pruned.trees[0];
    EXPECT_EQ(t.nodes.size(), 7u); // L4 removed
    EXPECT_EQ(leaves_of(t), (std::set<int>{1, 2}));
    EXPECT_EQ(t.height(), 5);
    EXPECT_FALSE(check_forest(pruned, &tags).has_value());
    EXPECT_TRUE(report.warnings.empty());

    const auto paths = query_paths(pruned, 0);
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_EQ(paths[0].back().node, (FlowNode{NodeKind::InletLeaf, 1}));
    EXPECT_EQ(paths[1].back().node, (FlowNode{NodeKind::InletLeaf, 2}));
}

TEST(Forest, CycleKeepsFirstParentAndWarns) {
    const std::vector<Tag> tags = {tag_at(TagKind::Outlet, {}, {}), tag_at(TagKind::Inlet, {}, {})};
    const std::vector<Association> links = {{ComponentKind::Tag, 0, 0, 0}, {ComponentKind::Tag, 1, 3, 0}};
    const std::vector<Junction> js = {edge(0, 1), edge(0, 2), edge(1, 3), edge(2, 3)};
    ForestReport report;
    const FlowForest f = prune_forest(build_forest(tags, links, js, &report));
    ASSERT_EQ(f.trees.size(), 1u);
    EXPECT_EQ(query_paths(f, 0).size(), 1u);
    EXPECT_FALSE(check_forest(f, &tags).has_value());
    ASSERT_EQ(report.warnings.size(), 1u);
    EXPECT_NE(report.warnings[0].find("line 3"), std::string::npos);
    const auto path = query_paths(f, 0)[0];
    EXPECT_EQ(path[2].node.ref, 1); // reached through the smaller neighbour
}

TEST(Forest, OutletsWithoutInletsOrLinesAreReported) {
    const std::vector<Tag> tags = {tag_at(TagKind::Outlet, {}, {}), tag_at(TagKind::Outlet, {}, {})};
    const std::vector<Association> links = {{ComponentKind::Tag, 0, 0, 0}};
    ForestReport report;
    const FlowForest f = prune_forest(build_forest(tags, links, {}, &report), &report);
    EXPECT_TRUE(f.trees.empty());
    EXPECT_EQ(report.outlets_without_line, std::vector<int>{1});
    EXPECT_EQ(report.dropped_trees, std::vector<int>{0});
}

TEST(Forest, SharedLinesAppearInBothTrees) {
    const std::vector<Tag> tags = {tag_at(TagKind::Outlet, {}, {}), tag_at(TagKind::Outlet, {}, {}),
                                   tag_at(TagKind::Inlet, {}, {})};
    const std::vector<Association> links = {
        {ComponentKind::Tag, 0, 0, 0}, {ComponentKind::Tag, 1, 1, 0}, {ComponentKind::Tag, 2, 2, 0}};
    const std::vector<Junction> js = {edge(0, 2), edge(1, 2)};
    const FlowForest f = prune_forest(build_forest(tags, links, js));
    ASSERT_EQ(f.trees.size(), 2u);
    const auto shared = f.shared_nodes();
    EXPECT_EQ(shared, (std::vector<FlowNode>{{NodeKind::Line, 2}, {NodeKind::InletLeaf, 2}}));
}

TEST(Query, DecoratesLinesAndRejectsUnknownOutlet) {
    const std::vector<Tag> tags = {tag_at(TagKind::Outlet, {}, {}), tag_at(TagKind::Inlet, {}, {})};
    const std::vector<Association> links = {{ComponentKind::Tag, 0, 0, 0}, {ComponentKind::Tag, 1, 0, 0}};
    const FlowForest f = prune_forest(build_forest(tags, links, {}));
    const std::vector<Association> deco = {{ComponentKind::Code, 4, 0, 1.0},
                                           {ComponentKind::Symbol, 2, 0, 1.0},
                                           {ComponentKind::Code, 1, 0, 2.0}};
    const auto paths = query_paths(f, 0, deco);
    ASSERT_EQ(paths.size(), 1u);
    ASSERT_EQ(paths[0].size(), 3u);
    EXPECT_EQ(paths[0][1].codes, (std::vector<int>{1, 4}));
    EXPECT_EQ(paths[0][1].symbols, std::vector<int>{2});
    EXPECT_THROW(query_paths(f, 1), NotFoundError);
    EXPECT_THROW(query_paths(f, 7), NotFoundError);
}

TEST(ForestProperty, RandomGraphsMatchReachabilityOracle) {
    std::mt19937 rng(20261016);
    for (int trial = 0; trial < 500; ++trial) {
        const auto c = oracle::random_flow_case(rng);
        const FlowForest raw = build_forest(c.tags, c.links, c.junctions);
        const FlowForest f = prune_forest(raw);
        ASSERT_FALSE(check_forest(f, &c.tags).has_value()) << "trial " << trial << ": " << *check_forest(f, &c.tags);

        // Pruning twice changes nothing.
        const FlowForest again = prune_forest(f);
        ASSERT_EQ(again.trees.size(), f.trees.size());
        for (std::size_t i = 0; i < f.trees.size(); ++i) {
            EXPECT_EQ(again.trees[i].nodes, f.trees[i].nodes);
            EXPECT_EQ(again.trees[i].parent, f.trees[i].parent);
        }

        for (std::size_t t = 0; t < c.tags.size(); ++t) {
            if (c.tags[t].kind != TagKind::Outlet) continue;
            const int outlet = static_cast<int>(t);
            const auto expect = oracle::reachable_inlets(c, outlet);
            const FlowTree* tree = f.find(outlet);
            if (expect.empty()) {
                EXPECT_EQ(tree, nullptr) << "trial " << trial;
                continue;
            }
            ASSERT_NE(tree, nullptr) << "trial " << trial;
            EXPECT_EQ(leaves_of(*tree), expect) << "trial " << trial;
            // One path per reachable inlet.
            const auto paths = query_paths(f, outlet);
            EXPECT_EQ(paths.size(), expect.size());
            for (const auto& p : paths) {
                EXPECT_EQ(p.front().node.kind, NodeKind::OutletRoot);
                EXPECT_EQ(p.back().node.kind, NodeKind::InletLeaf);
            }
        }
    }
}
