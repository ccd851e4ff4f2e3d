#include "ispt/render.hpp"

#include <fstream>
#include <sstream>

namespace ispt {

namespace {

constexpr int kCell = 18;
constexpr int kGap = 14;
constexpr int kMargin = 12;
constexpr int kLabelWidth = 170;

}  // namespace

std::string window_svg(const std::vector<FigureRow>& rows, GridDims dims) {
    const int w = dims.width, h = dims.height;
    std::size_t max_slices = 0;
    for (const auto& r : rows) max_slices = std::max(max_slices, r.window.slices.size());

    const int grid_w = w * kCell, grid_h = h * kCell;
    const int width = kMargin * 2 + kLabelWidth +
                      static_cast<int>(max_slices) * (grid_w + kGap);
    const int height = kMargin + static_cast<int>(rows.size()) * (grid_h + kGap);

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        const auto& row = rows[ri];
        const int y0 = kMargin + static_cast<int>(ri) * (grid_h + kGap);
        if (!row.label.empty())
            out << "<text x=\"" << kMargin << "\" y=\"" << y0 + grid_h / 2
                << "\" font-family=\"monospace\" font-size=\"12\" dominant-baseline=\"middle\">"
                << row.label << "</text>\n";
        for (std::size_t si = 0; si < row.window.slices.size(); ++si) {
            const int x0 = kMargin + kLabelWidth + static_cast<int>(si) * (grid_w + kGap);
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c) {
                    const char* fill = "white";
                    const bool masked =
                        row.node_masks &&
                        !(((*row.node_masks)[si] >> (r * w + c)) & 1u);
                    if (masked)
                        fill = "#b0b0b0";
                    else if (cell_at(row.window.slices[si], dims, r, c))
                        fill = "black";
                    out << "<rect x=\"" << x0 + c * kCell << "\" y=\"" << y0 + r * kCell
                        << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\""
                        << fill << "\" stroke=\"#606060\" stroke-width=\"1\"/>\n";
                }
        }
    }
    out << "</svg>\n";
    return out.str();
}

void write_svg(const std::filesystem::path& path, const std::vector<FigureRow>& rows,
               GridDims dims) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << window_svg(rows, dims);
}

std::string row_text(const FigureRow& row, GridDims dims) {
    std::string out;
    for (int r = 0; r < dims.height; ++r) {
        for (std::size_t si = 0; si < row.window.slices.size(); ++si) {
            if (si) out += "  ";
            for (int c = 0; c < dims.width; ++c) {
                const int k = r * dims.width + c;
                if (row.node_masks && !(((*row.node_masks)[si] >> k) & 1u))
                    out += ' ';
                else
                    out += cell_at(row.window.slices[si], dims, r, c) ? '#' : '.';
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace ispt
