#include "dfmr/budget.hpp"

#include <string>

namespace dfmr {

long long tokens_per_image(GridSize grid, int factor) {
    if (grid.height < 1 || grid.width < 1) {
        throw InvalidArgument("image grid dimensions must be >= 1");
    }
    if (factor < 1) {
        throw InvalidArgument("compression factor must be >= 1");
    }
    if (grid.height % factor != 0) {
        throw IndivisibleGrid("height", grid.height, factor);
    }
    if (grid.width % factor != 0) {
        throw IndivisibleGrid("width", grid.width, factor);
    }
    return static_cast<long long>(grid.height / factor) * (grid.width / factor);
}

long long sequence_length(const PromptSpec & spec, std::span<const int> factors) {
    if (factors.size() != spec.image_grids.size()) {
        throw LengthMismatch(spec.image_grids.size(), factors.size());
    }
    if (spec.text_tokens < 0 || spec.per_image_overhead < 0) {
        throw InvalidArgument("token counts must be >= 0");
    }
    long long total = spec.text_tokens;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        total += tokens_per_image(spec.image_grids[i], factors[i]) + spec.per_image_overhead;
    }
    return total;
}

long long max_images(GridSize grid, int factor, long long text_tokens, long long context_limit,
                     long long per_image_overhead) {
    if (context_limit < 1) {
        throw InvalidArgument("context limit must be >= 1");
    }
    if (text_tokens < 0) {
        throw InvalidArgument("token counts must be >= 0");
    }
    if (text_tokens >= context_limit) {
        return 0;
    }
    const long long per_image = tokens_per_image(grid, factor) + per_image_overhead;
    return (context_limit - text_tokens) / per_image;
}

VideoPlan plan_video(int frames, GridSize grid, std::span<const int> factors,
                     long long text_tokens, long long context_limit,
                     long long per_image_overhead) {
    if (frames < 0) {
        throw InvalidArgument("frame count must be >= 0");
    }
    PromptSpec spec;
    spec.image_grids.assign(static_cast<std::size_t>(frames), grid);
    spec.text_tokens = text_tokens;
    spec.context_limit = context_limit;
    spec.per_image_overhead = per_image_overhead;

    VideoPlan plan;
    plan.total = sequence_length(spec, factors);
    plan.fits = plan.total <= context_limit;
    plan.overflow = plan.fits ? 0 : plan.total - context_limit;
    return plan;
}

} // namespace dfmr
