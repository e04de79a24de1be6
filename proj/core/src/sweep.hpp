#pragma once

// Internal sweep entry points shared between the engine translation units.

#include <cstdint>
#include <span>
#include <vector>

#include "lpplab/lpp.hpp"

namespace lpplab::detail {

struct ReverseResult {
  std::int64_t lo = 0;  // diagonal range on row 0
  std::int64_t hi = -2;
  std::vector<double> values;
  std::vector<std::int64_t> labels;
};

/// Backward sweep from row t_top (cells d = top_lo + 2p, values already
/// including their own weights) to row 0, restricted to cells that can reach
/// row-0 diagonals in [target_lo, target_hi]. Row 0 adds no weight. Labels
/// follow the larger-label tie rule. Empty result when nothing is reachable.
ReverseResult reverse_to_boundary(const RowFiller& rows, std::int64_t t_top, std::int64_t top_lo,
                                  std::span<const double> top_values,
                                  std::span<const std::int64_t> top_labels,
                                  std::int64_t target_lo, std::int64_t target_hi);

}  // namespace lpplab::detail
