#ifndef ISPT_GRID_HPP
#define ISPT_GRID_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ispt {

// Thrown when an exhaustive computation would exceed the supported size.
class capacity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridDims {
    int width = 4;
    int height = 4;

    int cells() const { return width * height; }
    bool operator==(const GridDims&) const = default;
};

/// One grid configuration, bit k = cell (row k/width, col k%width), 1 = alive.
struct BitState {
    std::uint32_t bits = 0;

    auto operator<=>(const BitState&) const = default;
};

inline bool cell_at(BitState s, GridDims dims, int row, int col) {
    return (s.bits >> (row * dims.width + col)) & 1u;
}

/// Toroidal B3/S23 engine for grids with width*height <= 25 cells.
class LifeEngine {
public:
    explicit LifeEngine(GridDims dims);

    GridDims dims() const { return dims_; }

    /// One generation, bit-sliced neighbor counting.
    BitState step(BitState s) const;

    /// Per-cell neighbor loop. Slow; kept as the correctness reference.
    BitState step_reference(BitState s) const;

private:
    GridDims dims_;
    std::uint32_t all_mask_;
    std::uint32_t first_col_;
    std::uint32_t last_col_;
};

// A grid symmetry: optional mirror (columns), then quarter_turns 90-degree
// rotations (square grids only), then a toroidal translation.
struct GridSymmetry {
    int row_shift = 0;
    int col_shift = 0;
    int quarter_turns = 0;
    bool mirror = false;

    bool operator==(const GridSymmetry&) const = default;
};

/// Image of cell (row, col) under g.
std::pair<int, int> map_cell(const GridSymmetry& g, GridDims dims, int row, int col);

/// Output cell g(r,c) takes the value of input cell (r,c).
BitState apply_symmetry(BitState s, const GridSymmetry& g, GridDims dims);

/// Inverse element, found within the group generated by g's components.
GridSymmetry inverse_symmetry(const GridSymmetry& g, GridDims dims);

/// All width*height toroidal translations.
std::vector<GridSymmetry> translation_group(GridDims dims);

/// Translations combined with the point group (all of D4 when square,
/// otherwise mirror/180-rotation only).
std::vector<GridSymmetry> full_symmetry_group(GridDims dims);

/// Lexicographically least image of the slice sequence under the group.
/// Idempotent and constant on orbits.
std::vector<BitState> canonical_form(const std::vector<BitState>& window,
                                     const std::vector<GridSymmetry>& group,
                                     GridDims dims);

/// height lines of width characters, '.' dead and '#' alive.
std::string render_text(BitState s, GridDims dims);
BitState parse_text(const std::string& text, GridDims dims);

}  // namespace ispt

#endif
