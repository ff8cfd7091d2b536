#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cpimpute/cpi.hpp"

namespace cpimpute::kernels {

/// For every target, the index into `candidates` of its best match.
/// Reference implementation: one plain loop over targets.
std::vector<std::size_t> match_days_serial(std::span<const DayRecord> targets,
                                           std::span<const DayRecord> candidates,
                                           const DissimilarityWeights& w, const SeasonContext& ctx);

/// Same result as match_days_serial with targets distributed over threads.
std::vector<std::size_t> match_days_parallel(std::span<const DayRecord> targets,
                                             std::span<const DayRecord> candidates,
                                             const DissimilarityWeights& w, const SeasonContext& ctx,
                                             int threads = 0);

std::vector<std::size_t> match_days(std::span<const DayRecord> targets,
                                    std::span<const DayRecord> candidates,
                                    const DissimilarityWeights& w, const SeasonContext& ctx,
                                    const ExecutionPolicy& policy);

/// Row-major |targets| x |candidates| matrix of dissimilarities.
std::vector<double> dissimilarity_matrix_serial(std::span<const DayRecord> targets,
                                                std::span<const DayRecord> candidates,
                                                const DissimilarityWeights& w, const SeasonContext& ctx);

std::vector<double> dissimilarity_matrix_parallel(std::span<const DayRecord> targets,
                                                  std::span<const DayRecord> candidates,
                                                  const DissimilarityWeights& w,
                                                  const SeasonContext& ctx, int threads = 0);

}  // namespace cpimpute::kernels
