#pragma once

#include <optional>
#include <string>

#include "mcd/field.hpp"

namespace mcd {

enum class ShapeKind { LShape, Oval, Triangle, YShape, Disc, Custom };

std::string to_string(ShapeKind kind);
ShapeKind parse_shape_kind(const std::string& text);

/// Signal-region geometry. Built-in shapes are anchored at the grid center
/// (rows/2, cols/2); on a 100x100 grid they have
///   L        a 10x30 vertical bar plus a 10x10 foot        400 cells
///   Oval     ellipse, semi-axes 15 (rows) x 24 (cols)      1132 cells
///   Triangle isosceles, apex up, height 35, base 48        864 cells
///   Y        10-wide stem (38) and two 45-degree arms (48)  1342 cells
///   Disc     (dr^2 + dc^2 <= radius^2) around the center cell
struct ShapeSpec {
    ShapeKind kind = ShapeKind::LShape;
    int disc_radius = 20;
    std::optional<Mask> custom;

    static ShapeSpec disc(int radius) { return {ShapeKind::Disc, radius, {}}; }
    static ShapeSpec from_mask(Mask mask) { return {ShapeKind::Custom, 0, std::move(mask)}; }
};

/// Throws InvalidInput when the shape does not fit inside rows x cols.
Mask gen_shape(const ShapeSpec& shape, int rows, int cols);

}  // namespace mcd
