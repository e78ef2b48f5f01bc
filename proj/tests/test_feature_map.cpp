#include <doctest.h>

#include <limits>
#include <vector>

#include "dfmr/feature_map.hpp"

using namespace dfmr;

TEST_CASE("feature map construction validates shape and values") {
    SUBCASE("minimal one-token map") {
        const FeatureMap map(1, 1, 1, {0.0f});
        CHECK(map.tokens() == 1);
        CHECK(map.at(0, 0, 0) == 0.0f);
    }

    SUBCASE("24x24x1024 grid holds 576 tokens") {
        std::vector<float> values(24 * 24 * 1024, 0.5f);
        const FeatureMap map(24, 24, 1024, std::move(values));
        CHECK(map.tokens() == 576);
        CHECK(map.cell_count() == 589824u);
    }

    SUBCASE("length mismatch is rejected") {
        CHECK_THROWS_AS(FeatureMap(2, 2, 1, {1.0f, 2.0f}), LengthMismatch);
    }

    SUBCASE("non-finite value reports the first offending flat index") {
        const float nan = std::numeric_limits<float>::quiet_NaN();
        try {
            FeatureMap map(2, 2, 1, {0.0f, 1.0f, nan, 3.0f});
            FAIL("expected NonFiniteValue");
        } catch (const NonFiniteValue & e) {
            CHECK(e.index == 2);
        }
        const float inf = std::numeric_limits<float>::infinity();
        CHECK_THROWS_AS(FeatureMap(1, 2, 1, {inf, 0.0f}), NonFiniteValue);
    }

    SUBCASE("degenerate dimensions are rejected") {
        CHECK_THROWS_AS(FeatureMap(0, 1, 1, {}), InvalidArgument);
        CHECK_THROWS_AS(FeatureMap(1, 1, 0, {}), InvalidArgument);
    }

    SUBCASE("row-major indexing: channel fastest, then column") {
        // values laid out (row, col, channel)
        const FeatureMap map(2, 2, 2, {0, 1, 2, 3, 4, 5, 6, 7});
        CHECK(map.at(0, 0, 1) == 1.0f);
        CHECK(map.at(0, 1, 0) == 2.0f);
        CHECK(map.at(1, 0, 0) == 4.0f);
        CHECK(map.at(1, 1, 1) == 7.0f);
    }
}

TEST_CASE("partition geometry") {
    SUBCASE("coarse mode: window side shrinks as the factor grows") {
        const GridPartition p = partition(24, 24, 2, WindowMode::coarse);
        CHECK(p.window_rows == 12);
        CHECK(p.window_cols == 12);
        CHECK(p.window_count() == 4);
    }

    SUBCASE("pool mode: windows match the pooling unit") {
        const GridPartition p = partition(24, 24, 2, WindowMode::pool);
        CHECK(p.window_rows == 2);
        CHECK(p.window_cols == 2);
        CHECK(p.window_count() == 144);
    }

    SUBCASE("indivisible factor is rejected in both modes") {
        CHECK_THROWS_AS(partition(24, 24, 5, WindowMode::coarse), IndivisibleGrid);
        CHECK_THROWS_AS(partition(24, 24, 5, WindowMode::pool), IndivisibleGrid);
    }

    SUBCASE("per-dimension check on non-square grids") {
        const GridPartition p = partition(12, 24, 3, WindowMode::pool);
        CHECK(p.windows_y == 4);
        CHECK(p.windows_x == 8);
        try {
            partition(10, 12, 5, WindowMode::pool);
            FAIL("expected IndivisibleGrid");
        } catch (const IndivisibleGrid & e) {
            CHECK(e.dim == "width");
            CHECK(e.factor == 5);
        }
    }

    SUBCASE("windows tile the grid exactly") {
        for (const WindowMode mode : {WindowMode::coarse, WindowMode::pool}) {
            for (int factor : {1, 2, 3, 4, 6, 12}) {
                const GridPartition p = partition(12, 24, factor, mode);
                CHECK(static_cast<long>(p.window_count()) * p.window_rows * p.window_cols ==
                      12 * 24);
            }
        }
    }

    SUBCASE("factor below one is rejected") {
        CHECK_THROWS_AS(partition(4, 4, 0, WindowMode::coarse), InvalidArgument);
    }
}

TEST_CASE("window mode names round-trip") {
    CHECK(parse_window_mode("coarse") == WindowMode::coarse);
    CHECK(parse_window_mode("pool") == WindowMode::pool);
    CHECK_THROWS_AS(parse_window_mode("other"), InvalidArgument);
}
