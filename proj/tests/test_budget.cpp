#include <doctest.h>

#include <vector>

#include "dfmr/budget.hpp"
#include "dfmr/rng.hpp"

using namespace dfmr;

TEST_CASE("sequence length") {
    SUBCASE("single full-resolution image") {
        PromptSpec spec;
        spec.image_grids = {GridSize{24, 24}};
        spec.context_limit = 4096;
        const std::vector<int> factors = {1};
        CHECK(sequence_length(spec, factors) == 576);
    }

    SUBCASE("text only") {
        PromptSpec spec;
        spec.text_tokens = 7;
        spec.context_limit = 100;
        CHECK(sequence_length(spec, {}) == 7);
    }

    SUBCASE("three images at mixed factors plus text") {
        PromptSpec spec;
        spec.image_grids = {GridSize{24, 24}, GridSize{24, 24}, GridSize{24, 24}};
        spec.text_tokens = 100;
        spec.context_limit = 4096;
        const std::vector<int> factors = {1, 2, 3};
        CHECK(sequence_length(spec, factors) == 576 + 144 + 64 + 100);
    }

    SUBCASE("factor list must align with images") {
        PromptSpec spec;
        spec.image_grids = {GridSize{24, 24}};
        const std::vector<int> factors = {1, 2};
        CHECK_THROWS_AS(sequence_length(spec, factors), LengthMismatch);
    }

    SUBCASE("indivisible grid rejected") {
        PromptSpec spec;
        spec.image_grids = {GridSize{24, 24}};
        const std::vector<int> factors = {5};
        CHECK_THROWS_AS(sequence_length(spec, factors), IndivisibleGrid);
    }

    SUBCASE("per-image overhead counts once per image") {
        PromptSpec spec;
        spec.image_grids = {GridSize{24, 24}, GridSize{24, 24}};
        spec.per_image_overhead = 2;
        const std::vector<int> factors = {3, 3};
        CHECK(sequence_length(spec, factors) == 64 + 64 + 4);
    }

    SUBCASE("monotonicity in factors, text and frame count") {
        SplitMix64 rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            const int images = 1 + static_cast<int>(rng.next_below(6));
            PromptSpec spec;
            spec.image_grids.assign(images, GridSize{24, 24});
            spec.text_tokens = static_cast<long long>(rng.next_below(512));
            spec.context_limit = 1 << 20;
            std::vector<int> factors(images);
            const int choices[] = {1, 2, 3};
            for (auto & f : factors) {
                f = choices[rng.next_below(3)];
            }
            const long long base = sequence_length(spec, factors);

            // raising any single factor never lengthens the sequence
            for (int i = 0; i < images; ++i) {
                if (factors[i] < 3) {
                    auto larger = factors;
                    larger[i] = 3;
                    CHECK(sequence_length(spec, larger) <= base);
                }
            }
            // more text strictly lengthens
            spec.text_tokens += 1;
            CHECK(sequence_length(spec, factors) == base + 1);
            // one more frame never shortens
            spec.text_tokens -= 1;
            spec.image_grids.push_back(GridSize{24, 24});
            factors.push_back(3);
            CHECK(sequence_length(spec, factors) >= base);
        }
    }
}

TEST_CASE("max images") {
    const GridSize grid{24, 24};

    SUBCASE("frozen capacities at L=4096, 512 text tokens") {
        CHECK(max_images(grid, 1, 512, 4096) == 6);
        CHECK(max_images(grid, 2, 512, 4096) == 24);
        CHECK(max_images(grid, 3, 512, 4096) == 56);
    }

    SUBCASE("no room once text fills the context") {
        CHECK(max_images(grid, 1, 4096, 4096) == 0);
        CHECK(max_images(grid, 1, 5000, 4096) == 0);
    }

    SUBCASE("capacity is monotone in the factor") {
        for (long long text : {0LL, 100LL, 2000LL}) {
            const long long c1 = max_images(grid, 1, text, 4096);
            const long long c2 = max_images(grid, 2, text, 4096);
            const long long c3 = max_images(grid, 3, text, 4096);
            CHECK(c3 >= c2);
            CHECK(c2 >= c1);
        }
    }

    SUBCASE("indivisible factor rejected") {
        CHECK_THROWS_AS(max_images(grid, 7, 0, 4096), IndivisibleGrid);
    }
}

TEST_CASE("video planning") {
    const GridSize grid{24, 24};

    SUBCASE("eight compressed frames fit a 1k context") {
        const std::vector<int> factors(8, 3);
        const VideoPlan plan = plan_video(8, grid, factors, 256, 1024);
        CHECK(plan.total == 768);
        CHECK(plan.fits);
        CHECK(plan.overflow == 0);
    }

    SUBCASE("two full frames overflow a 1000-token context") {
        const std::vector<int> factors(2, 1);
        const VideoPlan plan = plan_video(2, grid, factors, 0, 1000);
        CHECK(plan.total == 1152);
        CHECK_FALSE(plan.fits);
        CHECK(plan.overflow == 152);
    }

    SUBCASE("zero frames reduces to the text check") {
        CHECK(plan_video(0, grid, {}, 10, 1024).fits);
        CHECK_FALSE(plan_video(0, grid, {}, 2000, 1024).fits);
    }

    SUBCASE("feasibility is monotone in the limit") {
        const std::vector<int> factors(4, 2);
        bool previous_fits = false;
        for (long long limit : {100LL, 576LL, 832LL, 4096LL}) {
            const bool fits = plan_video(4, grid, factors, 256, limit).fits;
            if (previous_fits) {
                CHECK(fits);
            }
            previous_fits = fits;
        }
    }
}
