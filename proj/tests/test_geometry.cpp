#include <doctest.h>

#include <cmath>
#include <random>

#include "survey/geometry.hpp"

using namespace survey;

namespace {

BBox random_box(std::mt19937_64& rng, double span = 100.0) {
    std::uniform_real_distribution<double> u(0.0, span);
    double x0 = u(rng), y0 = u(rng);
    std::uniform_real_distribution<double> w(0.5, span / 4);
    return BBox(x0, y0, x0 + w(rng), y0 + w(rng));
}

}  // namespace

TEST_CASE("iou worked examples") {
    const BBox a(0, 0, 2, 2);
    CHECK(iou(a, a) == doctest::Approx(1.0));

    const BBox far(10, 10, 12, 12);
    CHECK(iou(a, far) == 0.0);

    // Intersection 1, union 7.
    const BBox b(1, 1, 3, 3);
    CHECK(iou(a, b) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("iou is symmetric and self-iou exact") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const BBox a = random_box(rng), b = random_box(rng);
        CHECK(iou(a, b) == iou(b, a));
        CHECK(iou(a, a) == 1.0);
        CHECK(iou(a, b) >= 0.0);
        CHECK(iou(a, b) <= 1.0);
    }
}

TEST_CASE("bbox invariants rejected") {
    CHECK_THROWS_AS(BBox(2, 0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(BBox(0, 0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(BBox(0, 0, std::nan(""), 1), std::invalid_argument);
    CHECK_THROWS_AS(Detection(BBox(0, 0, 1, 1), ClassId::prairie_dog, 1.5),
                    std::invalid_argument);
}

TEST_CASE("remap_detection worked examples") {
    const Detection d(BBox(10, 20, 30, 40), ClassId::prairie_dog, 0.9, 3, "t");

    SUBCASE("identity and brightness leave geometry untouched") {
        for (TTAKind kind : {TTAKind::identity, TTAKind::brightness}) {
            const Detection r = remap_detection(d, {kind, 1.1, 512});
            CHECK(r.bbox == d.bbox);
            CHECK(r.confidence == d.confidence);
        }
    }
    SUBCASE("hflip in a 512 tile") {
        const Detection r = remap_detection(d, {TTAKind::hflip, 1.0, 512});
        CHECK(r.bbox == BBox(482, 20, 502, 40));
    }
    SUBCASE("out-of-tile box rejected") {
        const Detection big(BBox(10, 20, 600, 40), ClassId::prairie_dog, 0.9, 0, "t");
        CHECK_THROWS_AS(remap_detection(big, {TTAKind::hflip, 1.0, 512}), std::invalid_argument);
    }
}

TEST_CASE("remap involutions and rotation order") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 400.0);
    for (int i = 0; i < 100; ++i) {
        double x0 = u(rng), y0 = u(rng);
        const Detection d(BBox(x0, y0, x0 + 50, y0 + 40), ClassId::burrow, 0.5, 1, "t");
        auto near = [](const BBox& a, const BBox& b) {
            return std::abs(a.x_min - b.x_min) < 1e-9 && std::abs(a.y_min - b.y_min) < 1e-9 &&
                   std::abs(a.x_max - b.x_max) < 1e-9 && std::abs(a.y_max - b.y_max) < 1e-9;
        };
        for (TTAKind kind : {TTAKind::hflip, TTAKind::vflip, TTAKind::rot180}) {
            const TTATransform t{kind, 1.0, 512};
            CHECK(near(remap_detection(remap_detection(d, t), t).bbox, d.bbox));
        }
        const TTATransform r90{TTAKind::rot90, 1.0, 512};
        Detection cur = d;
        for (int k = 0; k < 4; ++k) cur = remap_detection(cur, r90);
        CHECK(near(cur.bbox, d.bbox));
        // rot90 then rot270 is also identity
        const Detection back =
            remap_detection(remap_detection(d, r90), {TTAKind::rot270, 1.0, 512});
        CHECK(near(back.bbox, d.bbox));
    }
}

TEST_CASE("px_distance_m worked examples") {
    const GeoTransform g{0.02, 0.0, 0.0};
    CHECK(px_distance_m({5, 5}, {5, 5}, g) == 0.0);
    CHECK(px_distance_m({0, 0}, {760, 0}, g) == doctest::Approx(15.2).epsilon(1e-12));
    CHECK(px_distance_m({0, 0}, {3, 4}, {1.0, 0, 0}) == doctest::Approx(5.0));
}

TEST_CASE("px_distance_m is a metric on random triples") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    const GeoTransform g{0.05, 0.0, 0.0};
    for (int i = 0; i < 500; ++i) {
        const Point p{u(rng), u(rng)}, q{u(rng), u(rng)}, r{u(rng), u(rng)};
        CHECK(px_distance_m(p, q, g) >= 0.0);
        CHECK(px_distance_m(p, q, g) == px_distance_m(q, p, g));
        CHECK(px_distance_m(p, r, g) <=
              px_distance_m(p, q, g) + px_distance_m(q, r, g) + 1e-9);
    }
}
