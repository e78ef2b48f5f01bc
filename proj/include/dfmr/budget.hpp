#pragma once

#include <span>
#include <vector>

#include "dfmr/error.hpp"

namespace dfmr {

struct GridSize {
    int height = 0;
    int width = 0;
};

// Sequence composition for one prompt: per-image token grids plus text tokens,
// against the language model's context limit. `per_image_overhead` models
// chat-template delimiter tokens; zero by default (plain concatenation).
struct PromptSpec {
    std::vector<GridSize> image_grids;
    long long text_tokens = 0;
    long long context_limit = 1;
    long long per_image_overhead = 0;
};

// Visual tokens one image contributes at compression factor s.
long long tokens_per_image(GridSize grid, int factor);

// Total sequence length: sum over images of (H/s_i)*(W/s_i) plus text tokens
// (plus any per-image overhead). `factors` must align with the image list.
long long sequence_length(const PromptSpec & spec, std::span<const int> factors);

// How many images of `grid` at factor s fit next to `text_tokens` within the
// context limit; 0 when the text alone fills it.
long long max_images(GridSize grid, int factor, long long text_tokens, long long context_limit,
                     long long per_image_overhead = 0);

struct VideoPlan {
    bool fits = false;
    long long total = 0;
    long long overflow = 0;
};

// Feasibility of a sampled-frame video prompt; `factors` holds the per-frame
// compression factor.
VideoPlan plan_video(int frames, GridSize grid, std::span<const int> factors,
                     long long text_tokens, long long context_limit,
                     long long per_image_overhead = 0);

} // namespace dfmr
