#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "kpz/limit_shape.hpp"
#include "kpz/parabola.hpp"
#include "kpz/shock_tree.hpp"

#include "oracles.hpp"

using namespace kpz;

namespace {

const ProbeConfig kPair{1.0, {-1.0, 1.0}, {0.5, 0.5}};
const double kSigma = 1.0 + std::sqrt(2.0);          // flank slope of kPair
const double kMerge = 2.0 * (std::sqrt(2.0) - 1.0);  // backward collision time

} // namespace

TEST_CASE("single probe above the origin: stationary trunk") {
    const ShockTree tree = build_shock_tree(ProbeConfig{1.0, {0.0}, {2.0}});
    REQUIRE(tree.segments.size() == 1);
    const ShockSegment& seg = tree.segments[0];
    CHECK(seg.s0 == 0.0);
    CHECK(seg.s1 == 1.0);
    CHECK(seg.v == 0.0);
    CHECK(seg.left_slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(seg.right_slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(tree.events.empty());
    CHECK(seg.position(1.0) == 0.0);
}

TEST_CASE("single off-center probe: straight line to the root") {
    // the backward velocity -x/t is independent of the height
    for (double h : {0.2, 1.0, 3.0}) {
        const ShockTree tree = build_shock_tree(ProbeConfig{1.0, {1.0}, {h}});
        REQUIRE(tree.segments.size() == 1);
        CHECK(tree.segments[0].x0 == 1.0);
        CHECK(tree.segments[0].v == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(tree.segments[0].position(1.0) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("symmetric pair: head-on merge at the center") {
    const ShockTree tree = build_shock_tree(kPair);
    REQUIRE(tree.segments.size() == 3);
    REQUIRE(tree.events.size() == 1);
    const MergeEvent& ev = tree.events[0];
    CHECK(ev.s == doctest::Approx(kMerge).epsilon(1e-12));
    CHECK(tree.segments[static_cast<std::size_t>(ev.merged)].position(ev.s) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // leaves carry the profile side slopes, velocity is their mean
    const ShockSegment& left = tree.segments[static_cast<std::size_t>(tree.leaf_segment[0])];
    CHECK(left.left_slope == doctest::Approx(kSigma).epsilon(1e-12));
    CHECK(left.right_slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(left.v == doctest::Approx(kSigma / 2.0).epsilon(1e-12));

    // the merged trunk keeps the outermost slopes and stalls at x = 0
    const ShockSegment& trunk = tree.segments[static_cast<std::size_t>(ev.merged)];
    CHECK(trunk.left_slope == doctest::Approx(kSigma).epsilon(1e-12));
    CHECK(trunk.right_slope == doctest::Approx(-kSigma).epsilon(1e-12));
    CHECK(trunk.v == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(trunk.s1 == 1.0);

    REQUIRE(tree.blocks.size() == 1);
    CHECK(tree.blocks[0] == std::vector<std::size_t>{0, 1});

    const std::vector<Cone> cones = cones_of(tree);
    REQUIRE(cones.size() == 1);
    CHECK(cones[0].v_left == doctest::Approx(-kSigma).epsilon(1e-12));
    CHECK(cones[0].v_right == doctest::Approx(kSigma).epsilon(1e-12));
}

TEST_CASE("backward-entropic slopes on every segment") {
    oracles::ConfigGen gen(808u);
    for (int rep = 0; rep < 15; ++rep) {
        const double t = gen.uniform(0.3, 1.0);
        const ProbeConfig c = gen.interior(t, 1 + static_cast<std::size_t>(rep % 4));
        const ShockTree tree = build_shock_tree(c);
        for (const ShockSegment& seg : tree.segments) {
            CHECK(seg.left_slope > seg.right_slope + 1e-12);
            // characteristics emerge from the shock in forward time:
            // the forward Lax condition is violated by construction
            CHECK(-seg.left_slope < -seg.v);
            CHECK(-seg.v < -seg.right_slope);
        }
    }
}

TEST_CASE("every lineage reaches the root at the origin") {
    oracles::ConfigGen gen(909u);
    for (int rep = 0; rep < 15; ++rep) {
        const double t = gen.uniform(0.3, 1.0);
        const ProbeConfig c = gen.interior(t, 1 + static_cast<std::size_t>(rep % 5));
        const ShockTree tree = build_shock_tree(c);
        for (std::size_t p = 0; p < c.size(); ++p) {
            const int id = tree.lineage_at(p, t);
            REQUIRE(id >= 0);
            const ShockSegment& seg = tree.segments[static_cast<std::size_t>(id)];
            CHECK(seg.parent == -1);
            CHECK(std::fabs(seg.position(t)) <= 1e-8);
        }
        // events strictly ordered in backward time
        for (std::size_t e = 1; e < tree.events.size(); ++e)
            CHECK(tree.events[e].s >= tree.events[e - 1].s - 1e-12);
    }
}

TEST_CASE("corridor masses accumulate along lineages") {
    const ShockTree bare = build_shock_tree(kPair);
    const ShockTree tree = corridor_masses(bare, {1.5, 0.75});
    const int l0 = tree.leaf_segment[0], l1 = tree.leaf_segment[1];
    CHECK(tree.segments[static_cast<std::size_t>(l0)].mass == doctest::Approx(1.5));
    CHECK(tree.segments[static_cast<std::size_t>(l1)].mass == doctest::Approx(0.75));
    const int root = tree.block_root[0];
    CHECK(tree.segments[static_cast<std::size_t>(root)].mass ==
          doctest::Approx(2.25).epsilon(1e-15));
    CHECK_THROWS_AS(corridor_masses(bare, {-1.0, 1.0}), DomainError);
}

TEST_CASE("two separated blocks produce disjoint cones") {
    const double t = 1.0;
    const ProbeConfig c{t,
                        {-2.5, 2.5},
                        {parabola_eval(t, -2.5) + 0.3, parabola_eval(t, 2.5) + 0.3}};
    const ShockTree tree = build_shock_tree(c);
    REQUIRE(tree.blocks.size() == 2);
    const std::vector<Cone> cones = cones_of(tree);
    REQUIRE(cones.size() == 2);
    CHECK(cones[0].v_right <= cones[1].v_left + 1e-12);

    const LimitShape shape = build_limit_shape(c);
    // between the cones the parabola shows through
    for (double tt : {0.2, 0.5, 0.9}) {
        const double gap_left = cones[0].v_right * tt;
        const double gap_right = cones[1].v_left * tt;
        const double x = 0.5 * (gap_left + gap_right);
        CHECK(shape_eval(shape, tt, x) == parabola_eval(tt, x));
    }
}

TEST_CASE("terminal slice reproduces the profile exactly") {
    oracles::ConfigGen gen(313u);
    for (int rep = 0; rep < 10; ++rep) {
        const double t = gen.uniform(0.3, 1.0);
        const ProbeConfig c = gen.interior(t, 1 + static_cast<std::size_t>(rep % 3));
        const LimitShape shape = build_limit_shape(c);
        const TerminalProfile p = build_profile(c);
        for (int q = 0; q < 50; ++q) {
            const double x = gen.uniform(-5.0, 5.0);
            CHECK(shape_eval(shape, t, x) == profile_eval(p, x));
        }
    }
}

TEST_CASE("outside all cones the background parabola shows through") {
    const LimitShape shape = build_limit_shape(kPair);
    for (double t : {0.1, 0.5, 0.99}) {
        const double edge = kSigma * t;
        for (double off : {0.001, 0.5, 3.0}) {
            CHECK(shape_eval(shape, t, edge + off) == parabola_eval(t, edge + off));
            CHECK(shape_eval(shape, t, -edge - off) == parabola_eval(t, -edge - off));
        }
    }
}

TEST_CASE("flat chord value persists down the middle until the merge") {
    const LimitShape shape = build_limit_shape(kPair);
    // before the backward merge the center sits in the zero-slope region
    for (double s : {0.1, 0.4, 0.8}) {
        CHECK(shape_eval(shape, 1.0 - s, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    }
    // after it the trunk pins the value from the flank characteristics
    const double s = 0.9;
    const double foot = -kSigma * s;
    const double want = 0.5 + kSigma * (foot + 1.0) + kSigma * kSigma * s / 2.0;
    CHECK(shape_eval(shape, 1.0 - s, 0.0) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("one-point trunk value decays linearly to the origin") {
    const double h = 1.0;
    const LimitShape shape = build_limit_shape(ProbeConfig{1.0, {0.0}, {h}});
    for (double t : {0.25, 0.5, 0.75})
        CHECK(shape_eval(shape, t, 0.0) == doctest::Approx(h * t).epsilon(1e-12));
}

TEST_CASE("characteristics are straight and transport the value") {
    oracles::ConfigGen gen(616u);
    int checked = 0;
    for (int rep = 0; rep < 12 || checked < 40; ++rep) {
        REQUIRE(rep < 200);
        const double tt = gen.uniform(0.4, 1.0);
        const ProbeConfig c = gen.interior(tt, 1 + static_cast<std::size_t>(rep % 3));
        const LimitShape shape = build_limit_shape(c);
        const TerminalProfile p = build_profile(c);
        for (int q = 0; q < 20; ++q) {
            const double t = gen.uniform(0.05 * tt, 0.95 * tt);
            const double x = gen.uniform(-3.0, 3.0);
            Characteristic ch;
            try {
                ch = characteristic_through(shape, t, x);
            } catch (const OnShockError&) {
                continue;
            }
            const double s = tt - t;
            CHECK(std::fabs(ch.foot - (x - ch.slope * s)) <= 1e-9);
            const double value = profile_eval(p, ch.foot) + ch.slope * ch.slope * s / 2.0;
            CHECK(shape_eval(shape, t, x) == doctest::Approx(value).epsilon(1e-11));
            // march 40% of the way to the terminal line along the line
            const double t2 = t + 0.4 * s;
            const double x2 = ch.foot + ch.slope * (tt - t2);
            try {
                const Characteristic ch2 = characteristic_through(shape, t2, x2);
                CHECK(std::fabs(ch2.foot - ch.foot) <= 1e-9);
                CHECK(std::fabs(ch2.slope - ch.slope) <= 1e-9);
                ++checked;
            } catch (const OnShockError&) {
            }
        }
    }
}

TEST_CASE("on-shock queries raise with both candidate feet") {
    const LimitShape shape = build_limit_shape(kPair);
    // the trunk sits at x = 0 for t in (0, 1 - merge time)
    const double t = 0.1;
    CHECK_THROWS_AS(characteristic_through(shape, t, 0.0), OnShockError);
    try {
        characteristic_through(shape, t, 0.0);
    } catch (const OnShockError& e) {
        CHECK(e.foot_left < 0.0);
        CHECK(e.foot_right > 0.0);
        CHECK(e.foot_left == doctest::Approx(-e.foot_right).epsilon(1e-12));
    }
    // terminal kinks are on-shock queries as well
    CHECK_THROWS_AS(characteristic_through(shape, 1.0, -1.0), OnShockError);
}

TEST_CASE("shape agrees with the brute-force inf-convolution") {
    oracles::ConfigGen gen(515u);
    for (int rep = 0; rep < 6; ++rep) {
        const ProbeConfig c = gen.interior(1.0, 1 + static_cast<std::size_t>(rep % 3));
        const LimitShape shape = build_limit_shape(c);
        const TerminalProfile p = build_profile(c);
        for (double t : {0.15, 0.4, 0.7, 0.95}) {
            for (double x = -4.0; x <= 4.0; x += 0.25) {
                const double lib = shape_eval(shape, t, x);
                const double ora = shape_eval_oracle(p, t, x, 1e-4);
                CHECK(std::fabs(lib - ora) < 1e-3);
            }
        }
    }
}

TEST_CASE("oracle degenerates to the profile at terminal time") {
    const TerminalProfile p = build_profile(kPair);
    for (double x : {-2.0, 0.0, 0.7, 3.0})
        CHECK(shape_eval_oracle(p, 1.0, x, 1e-4) == profile_eval(p, x));
}

TEST_CASE("domain checks on evaluation times") {
    const LimitShape shape = build_limit_shape(kPair);
    CHECK_THROWS_AS(shape_eval(shape, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(shape_eval(shape, -0.5, 0.0), DomainError);
    CHECK_THROWS_AS(shape_eval(shape, 1.0001, 0.0), DomainError);
    CHECK_THROWS_AS(build_shock_tree(ProbeConfig{1.0, {-1.0, 0.0, 1.0}, {0.5, 0.3, 0.5}}),
                    DomainError);
}

TEST_CASE("tree JSON reports affine segments and cones") {
    const ShockTree tree = corridor_masses(build_shock_tree(kPair), {1.0, 1.0});
    const auto doc = nlohmann::json::parse(shock_tree_to_json(tree));
    REQUIRE(doc.at("segments").size() == 3);
    REQUIRE(doc.at("events").size() == 1);
    CHECK(doc.at("t_term").get<double>() == 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& js = doc.at("segments").at(i);
        const ShockSegment& seg = tree.segments[i];
        // serialized as position(s) = a + v s
        const double a = js.at("a").get<double>();
        const double v = js.at("v").get<double>();
        CHECK(a + v * seg.s0 == doctest::Approx(seg.x0).epsilon(1e-12));
        CHECK(v == doctest::Approx(seg.v).epsilon(1e-15));
        CHECK(js.at("mass").get<double>() > 0.0);
    }
    CHECK(doc.at("cones").size() == 1);
}
