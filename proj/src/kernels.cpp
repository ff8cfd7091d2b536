#include "cpimpute/kernels.hpp"

#include <omp.h>

namespace cpimpute {

int effective_threads(const ExecutionPolicy& policy) {
    if (!policy.parallel) return 1;
    return policy.threads > 0 ? policy.threads : omp_get_max_threads();
}

namespace kernels {

std::vector<std::size_t> match_days_serial(std::span<const DayRecord> targets,
                                           std::span<const DayRecord> candidates,
                                           const DissimilarityWeights& w, const SeasonContext& ctx) {
    std::vector<std::size_t> out(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        out[i] = select_best_match(targets[i], candidates, w, ctx);
    }
    return out;
}

std::vector<std::size_t> match_days_parallel(std::span<const DayRecord> targets,
                                             std::span<const DayRecord> candidates,
                                             const DissimilarityWeights& w, const SeasonContext& ctx,
                                             int threads) {
    // Exceptions must not escape an OpenMP region, so check preconditions here.
    if (candidates.empty() && !targets.empty()) {
        throw ImputationError("no complete day available");
    }
    if (!(ctx.e_max > ctx.e_min)) throw std::invalid_argument("season context needs e_max > e_min");
    std::vector<std::size_t> out(targets.size());
    const auto n = static_cast<long long>(targets.size());
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(nthreads)
    for (long long i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] =
            select_best_match(targets[static_cast<std::size_t>(i)], candidates, w, ctx);
    }
    return out;
}

std::vector<std::size_t> match_days(std::span<const DayRecord> targets,
                                    std::span<const DayRecord> candidates,
                                    const DissimilarityWeights& w, const SeasonContext& ctx,
                                    const ExecutionPolicy& policy) {
    if (!policy.parallel) return match_days_serial(targets, candidates, w, ctx);
    return match_days_parallel(targets, candidates, w, ctx, policy.threads);
}

std::vector<double> dissimilarity_matrix_serial(std::span<const DayRecord> targets,
                                                std::span<const DayRecord> candidates,
                                                const DissimilarityWeights& w, const SeasonContext& ctx) {
    std::vector<double> out(targets.size() * candidates.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            out[i * candidates.size() + j] = dissimilarity(targets[i], candidates[j], w, ctx);
        }
    }
    return out;
}

std::vector<double> dissimilarity_matrix_parallel(std::span<const DayRecord> targets,
                                                  std::span<const DayRecord> candidates,
                                                  const DissimilarityWeights& w,
                                                  const SeasonContext& ctx, int threads) {
    if (!(ctx.e_max > ctx.e_min)) throw std::invalid_argument("season context needs e_max > e_min");
    std::vector<double> out(targets.size() * candidates.size());
    const auto rows = static_cast<long long>(targets.size());
    const std::size_t cols = candidates.size();
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (long long i = 0; i < rows; ++i) {
        const auto r = static_cast<std::size_t>(i);
        for (std::size_t j = 0; j < cols; ++j) {
            out[r * cols + j] = dissimilarity(targets[r], candidates[j], w, ctx);
        }
    }
    return out;
}

}  // namespace kernels
}  // namespace cpimpute
