#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mcd {

enum class WindowShape { Square, Circle };

/// A centered window. Square covers max(|di|,|dj|) <= radius, Circle covers
/// di^2 + dj^2 <= radius^2. Radius 0 is the center cell for both shapes.
struct WindowSpec {
    WindowShape shape = WindowShape::Square;
    int radius = 0;

    /// Half-width of the window on row offset di (|di| <= radius), i.e. the
    /// window covers columns [-w, w] on that row.
    int half_width(int di) const;

    /// Number of offsets in the unclipped window.
    std::int64_t cell_count() const;

    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

std::string to_string(WindowShape shape);
WindowShape parse_window_shape(const std::string& text);
std::string to_string(const WindowSpec& window);

/// Nested windows D_1 ⊂ ... ⊂ D_M, first entry radius 0.
class ScaleLadder {
public:
    explicit ScaleLadder(std::vector<WindowSpec> windows);

    /// [radius 0, Square radius 5]
    static ScaleLadder two_scale(int max_radius = 5, WindowShape shape = WindowShape::Square);
    /// [0, 1, ..., max_radius] of one shape.
    static ScaleLadder consecutive(int max_radius, WindowShape shape = WindowShape::Square);
    static ScaleLadder single_scale();

    /// Parses "0,s5" / "0,c2,s4" / "0,1,2" (bare numbers take `default_shape`).
    static ScaleLadder parse(const std::string& text, WindowShape default_shape = WindowShape::Square);

    int scale_count() const noexcept { return static_cast<int>(windows_.size()); }
    const WindowSpec& operator[](int r) const { return windows_.at(static_cast<std::size_t>(r)); }
    const std::vector<WindowSpec>& windows() const noexcept { return windows_; }
    int max_radius() const noexcept { return windows_.back().radius; }

    std::string to_string() const;

    friend bool operator==(const ScaleLadder&, const ScaleLadder&) = default;

private:
    std::vector<WindowSpec> windows_;
};

}  // namespace mcd
