#ifndef ISPT_RENDER_HPP
#define ISPT_RENDER_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ispt/ensemble.hpp"

namespace ispt {

/// One figure row: a window drawn as a horizontal run of grids. When
/// node_masks is set, cells outside the mask are drawn gray (unspecified).
struct FigureRow {
    TrajectoryWindow window;
    std::optional<std::vector<std::uint32_t>> node_masks;
    std::string label;
};

std::string window_svg(const std::vector<FigureRow>& rows, GridDims dims);
void write_svg(const std::filesystem::path& path, const std::vector<FigureRow>& rows,
               GridDims dims);

/// Text form of one figure row, slices separated by a blank column.
/// Unspecified cells render as ' '.
std::string row_text(const FigureRow& row, GridDims dims);

}  // namespace ispt

#endif
