#include "mcd/shapes.hpp"

#include <cmath>
#include <functional>

namespace mcd {

namespace {

using Predicate = std::function<bool(int, int)>;

// Oriented 10-wide bar from (r0, c0) along (dr, dc) for `length`, tested at cell centers.
bool in_bar(double r, double c, double r0, double c0, double dr, double dc, double length, double width) {
    const double vr = r - r0, vc = c - c0;
    const double t = vr * dr + vc * dc;
    const double s = -vr * dc + vc * dr;
    return t >= 0.0 && t <= length && std::abs(s) <= width / 2.0;
}

Predicate predicate_for(const ShapeSpec& shape, int rows, int cols) {
    const int cr = rows / 2, cc = cols / 2;
    switch (shape.kind) {
        case ShapeKind::LShape:
            return [=](int r, int c) {
                const bool bar = r >= cr - 15 && r < cr + 15 && c >= cc - 10 && c < cc;
                const bool foot = r >= cr + 5 && r < cr + 15 && c >= cc && c < cc + 10;
                return bar || foot;
            };
        case ShapeKind::Oval:
            return [=](int r, int c) {
                const double y = (r + 0.5 - cr) / 15.0, x = (c + 0.5 - cc) / 24.0;
                return y * y + x * x <= 1.0;
            };
        case ShapeKind::Triangle:
            return [=](int r, int c) {
                constexpr int height = 35;
                constexpr double base = 48.0;
                const int k = r - (cr - 20);
                if (k < 0 || k >= height) return false;
                return std::abs(c + 0.5 - cc) <= (k + 1) * base / (2.0 * height);
            };
        case ShapeKind::YShape:
            return [=](int r, int c) {
                const double y = r + 0.5, x = c + 0.5;
                const double diag = 1.0 / std::sqrt(2.0);
                return in_bar(y, x, cr, cc, 1.0, 0.0, 38.0, 10.0) ||
                       in_bar(y, x, cr, cc, -diag, -diag, 48.0, 10.0) ||
                       in_bar(y, x, cr, cc, -diag, diag, 48.0, 10.0);
            };
        case ShapeKind::Disc: {
            const int radius = shape.disc_radius;
            return [=](int r, int c) { return (r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius; };
        }
        case ShapeKind::Custom: break;
    }
    throw InternalError("no predicate for custom shapes");
}

}  // namespace

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::LShape: return "L";
        case ShapeKind::Oval: return "oval";
        case ShapeKind::Triangle: return "triangle";
        case ShapeKind::YShape: return "Y";
        case ShapeKind::Disc: return "disc";
        case ShapeKind::Custom: return "custom";
    }
    return "?";
}

ShapeKind parse_shape_kind(const std::string& text) {
    if (text == "L" || text == "l" || text == "lshape") return ShapeKind::LShape;
    if (text == "oval") return ShapeKind::Oval;
    if (text == "triangle") return ShapeKind::Triangle;
    if (text == "Y" || text == "y" || text == "yshape") return ShapeKind::YShape;
    if (text == "disc") return ShapeKind::Disc;
    if (text == "custom") return ShapeKind::Custom;
    throw ConfigError("unknown shape '" + text + "' (expected L, oval, triangle, Y or disc)");
}

Mask gen_shape(const ShapeSpec& shape, int rows, int cols) {
    if (shape.kind == ShapeKind::Custom) {
        if (!shape.custom) throw InvalidInput("custom shape without a mask");
        if (shape.custom->rows() != rows || shape.custom->cols() != cols)
            throw InvalidInput("custom shape mask does not match the grid dimensions");
        return *shape.custom;
    }
    if (shape.kind == ShapeKind::Disc && shape.disc_radius < 0) throw InvalidInput("negative disc radius");
    const auto inside = predicate_for(shape, rows, cols);
    Mask mask(rows, cols);
    // Scan a margin around the grid so a shape that spills over is reported.
    const int margin = 120;
    for (int r = -margin; r < rows + margin; ++r) {
        for (int c = -margin; c < cols + margin; ++c) {
            if (!inside(r, c)) continue;
            if (!mask.contains(r, c))
                throw InvalidInput("shape '" + to_string(shape.kind) + "' does not fit a " + std::to_string(rows) +
                                   "x" + std::to_string(cols) + " grid");
            mask(r, c) = 1;
        }
    }
    return mask;
}

}  // namespace mcd
