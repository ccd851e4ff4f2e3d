#include "ispt/grid.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace ispt {

namespace {

void check_dims(GridDims dims) {
    if (dims.width < 1 || dims.height < 1)
        throw std::invalid_argument("grid dimensions must be positive");
    if (dims.cells() > 25)
        throw capacity_error("grid exceeds 25 cells; exhaustive mode unsupported");
}

int mod(int a, int m) { return ((a % m) + m) % m; }

}  // namespace

LifeEngine::LifeEngine(GridDims dims) : dims_(dims) {
    check_dims(dims);
    const int w = dims.width, h = dims.height;
    all_mask_ = (dims.cells() == 32) ? ~0u : ((1u << dims.cells()) - 1u);
    first_col_ = 0;
    for (int r = 0; r < h; ++r) first_col_ |= 1u << (r * w);
    last_col_ = first_col_ << (w - 1);
}

BitState LifeEngine::step(BitState s) const {
    const int w = dims_.width, h = dims_.height;
    const std::uint32_t x = s.bits;

    // Row/column rotations of the packed word.
    auto up = [&](std::uint32_t v) {  // value of the cell one row above
        return ((v << w) | (v >> (w * (h - 1)))) & all_mask_;
    };
    auto down = [&](std::uint32_t v) {
        return ((v >> w) | (v << (w * (h - 1)))) & all_mask_;
    };
    auto left = [&](std::uint32_t v) {  // value of the cell one column left
        return (((v & ~last_col_) << 1) | ((v & last_col_) >> (w - 1))) & all_mask_;
    };
    auto right = [&](std::uint32_t v) {
        return (((v & ~first_col_) >> 1) | ((v & first_col_) << (w - 1))) & all_mask_;
    };

    const std::uint32_t l = left(x), r = right(x);
    const std::array<std::uint32_t, 8> nbrs = {
        up(x), down(x), l, r, up(l), up(r), down(l), down(r)};

    // Saturating 3-bit counter per cell.
    std::uint32_t ones = 0, twos = 0, fours = 0;
    for (std::uint32_t n : nbrs) {
        const std::uint32_t c1 = ones & n;
        ones ^= n;
        const std::uint32_t c2 = twos & c1;
        twos ^= c1;
        fours |= c2;
    }
    // Alive next iff count==3, or alive now and count==2.
    return BitState{(~fours & twos & (ones | x)) & all_mask_};
}

BitState LifeEngine::step_reference(BitState s) const {
    const int w = dims_.width, h = dims_.height;
    std::uint32_t out = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            int count = 0;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    if (cell_at(s, dims_, mod(r + dr, h), mod(c + dc, w))) ++count;
                }
            const bool alive = cell_at(s, dims_, r, c);
            if (count == 3 || (alive && count == 2)) out |= 1u << (r * w + c);
        }
    }
    return BitState{out};
}

std::pair<int, int> map_cell(const GridSymmetry& g, GridDims dims, int row, int col) {
    if (g.quarter_turns % 4 != 0 && dims.width != dims.height)
        throw std::invalid_argument("rotation requires a square grid");
    int r = row, c = col;
    if (g.mirror) c = dims.width - 1 - c;
    for (int i = 0; i < mod(g.quarter_turns, 4); ++i) {
        const int nr = c;
        const int nc = dims.height - 1 - r;
        r = nr;
        c = nc;
    }
    return {mod(r + g.row_shift, dims.height), mod(c + g.col_shift, dims.width)};
}

BitState apply_symmetry(BitState s, const GridSymmetry& g, GridDims dims) {
    check_dims(dims);
    std::uint32_t out = 0;
    for (int r = 0; r < dims.height; ++r)
        for (int c = 0; c < dims.width; ++c) {
            if (!cell_at(s, dims, r, c)) continue;
            const auto [nr, nc] = map_cell(g, dims, r, c);
            out |= 1u << (nr * dims.width + nc);
        }
    return BitState{out};
}

GridSymmetry inverse_symmetry(const GridSymmetry& g, GridDims dims) {
    // The candidate set below is the full symmetry group; search it for the
    // element undoing g's cell permutation.
    const auto group = (dims.width == dims.height || g.quarter_turns % 4 == 0)
                           ? full_symmetry_group(dims)
                           : translation_group(dims);
    for (const auto& h : group) {
        bool ok = true;
        for (int r = 0; r < dims.height && ok; ++r)
            for (int c = 0; c < dims.width && ok; ++c) {
                const auto [gr, gc] = map_cell(g, dims, r, c);
                const auto [br, bc] = map_cell(h, dims, gr, gc);
                ok = (br == r && bc == c);
            }
        if (ok) return h;
    }
    throw std::logic_error("symmetry has no inverse in the group");
}

std::vector<GridSymmetry> translation_group(GridDims dims) {
    check_dims(dims);
    std::vector<GridSymmetry> out;
    for (int dr = 0; dr < dims.height; ++dr)
        for (int dc = 0; dc < dims.width; ++dc)
            out.push_back(GridSymmetry{dr, dc, 0, false});
    return out;
}

std::vector<GridSymmetry> full_symmetry_group(GridDims dims) {
    check_dims(dims);
    std::vector<GridSymmetry> out;
    const int turns = (dims.width == dims.height) ? 4 : 1;
    for (int dr = 0; dr < dims.height; ++dr)
        for (int dc = 0; dc < dims.width; ++dc)
            for (int m = 0; m < 2; ++m)
                for (int q = 0; q < turns; ++q)
                    out.push_back(GridSymmetry{dr, dc, q, m != 0});
    return out;
}

std::vector<BitState> canonical_form(const std::vector<BitState>& window,
                                     const std::vector<GridSymmetry>& group,
                                     GridDims dims) {
    if (group.empty()) throw std::invalid_argument("symmetry group must be nonempty");
    std::vector<BitState> best;
    std::vector<BitState> cur(window.size());
    for (const auto& g : group) {
        for (std::size_t i = 0; i < window.size(); ++i)
            cur[i] = apply_symmetry(window[i], g, dims);
        if (best.empty() || cur < best) best = cur;
    }
    return best;
}

std::string render_text(BitState s, GridDims dims) {
    std::string out;
    for (int r = 0; r < dims.height; ++r) {
        for (int c = 0; c < dims.width; ++c)
            out += cell_at(s, dims, r, c) ? '#' : '.';
        out += '\n';
    }
    return out;
}

BitState parse_text(const std::string& text, GridDims dims) {
    std::uint32_t bits = 0;
    int idx = 0;
    for (char ch : text) {
        if (ch == '\n' || ch == ' ' || ch == '\r') continue;
        if (idx >= dims.cells()) throw std::invalid_argument("too many cells in grid text");
        if (ch == '#') bits |= 1u << idx;
        else if (ch != '.') throw std::invalid_argument("grid text must use '.' and '#'");
        ++idx;
    }
    if (idx != dims.cells()) throw std::invalid_argument("too few cells in grid text");
    return BitState{bits};
}

}  // namespace ispt
