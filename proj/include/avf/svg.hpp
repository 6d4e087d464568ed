#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avf/io.hpp"

namespace avf::svg {

/// Log-log plot of the ordered size list: the point for the k-th largest
/// size n sits at (n, k), so a law n^-gamma shows slope -(gamma - 1). A red
/// reference line of slope `reference_slope` passes through the median
/// point of the plotted sizes. Non-positive sizes are dropped; throws
/// std::invalid_argument when nothing is left.
std::string ordered_size_plot(const std::vector<std::int64_t>& sizes, double reference_slope = -0.5);

/// Partition raster, one rect per cell, row y = 0 at the bottom. The hue of
/// label b is its position in sigma (or b itself when sigma is empty)
/// divided by the number of boundary half-edges.
std::string partition_raster(const io::PartitionSnapshot& s, int cell_pixels = 6);

}  // namespace avf::svg
