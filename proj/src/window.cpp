#include "mcd/window.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "mcd/error.hpp"

namespace mcd {

namespace {

int isqrt(int n) {
    int w = static_cast<int>(std::sqrt(static_cast<double>(n)));
    while (w * w > n) --w;
    while ((w + 1) * (w + 1) <= n) ++w;
    return w;
}

}  // namespace

int WindowSpec::half_width(int di) const {
    const int a = std::abs(di);
    if (a > radius) return -1;
    if (shape == WindowShape::Square) return radius;
    return isqrt(radius * radius - a * a);
}

std::int64_t WindowSpec::cell_count() const {
    std::int64_t n = 0;
    for (int di = -radius; di <= radius; ++di) n += 2 * half_width(di) + 1;
    return n;
}

std::string to_string(WindowShape shape) {
    return shape == WindowShape::Square ? "square" : "circle";
}

WindowShape parse_window_shape(const std::string& text) {
    if (text == "square" || text == "s") return WindowShape::Square;
    if (text == "circle" || text == "c") return WindowShape::Circle;
    throw ConfigError("unknown window shape '" + text + "' (expected square or circle)");
}

std::string to_string(const WindowSpec& window) {
    // radius 0 is the single cell whatever the shape
    if (window.radius == 0) return "0";
    return (window.shape == WindowShape::Square ? "s" : "c") + std::to_string(window.radius);
}

ScaleLadder::ScaleLadder(std::vector<WindowSpec> windows) : windows_(std::move(windows)) {
    if (windows_.empty()) throw InvalidInput("scale ladder is empty");
    if (windows_.front().radius != 0)
        throw InvalidInput("scale ladder must start at radius 0, got " + mcd::to_string(windows_.front()));
    for (std::size_t r = 0; r < windows_.size(); ++r) {
        if (windows_[r].radius < 0) throw InvalidInput("negative window radius");
        if (r == 0) continue;
        const auto& inner = windows_[r - 1];
        const auto& outer = windows_[r];
        if (outer.radius <= inner.radius)
            throw InvalidInput("scale ladder radii must be strictly increasing: " + to_string());
        for (int di = -inner.radius; di <= inner.radius; ++di) {
            if (inner.half_width(di) > outer.half_width(di))
                throw InvalidInput("scale ladder windows are not nested: " + mcd::to_string(inner) +
                                   " is not contained in " + mcd::to_string(outer));
        }
    }
}

ScaleLadder ScaleLadder::two_scale(int max_radius, WindowShape shape) {
    return ScaleLadder({{shape, 0}, {shape, max_radius}});
}

ScaleLadder ScaleLadder::consecutive(int max_radius, WindowShape shape) {
    std::vector<WindowSpec> windows;
    for (int r = 0; r <= max_radius; ++r) windows.push_back({shape, r});
    return ScaleLadder(std::move(windows));
}

ScaleLadder ScaleLadder::single_scale() { return ScaleLadder({{WindowShape::Square, 0}}); }

ScaleLadder ScaleLadder::parse(const std::string& text, WindowShape default_shape) {
    std::vector<WindowSpec> windows;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (item.empty()) throw ConfigError("empty entry in ladder '" + text + "'");
        WindowSpec w{default_shape, 0};
        std::size_t pos = 0;
        if (item[0] == 's' || item[0] == 'S') {
            w.shape = WindowShape::Square;
            pos = 1;
        } else if (item[0] == 'c' || item[0] == 'C') {
            w.shape = WindowShape::Circle;
            pos = 1;
        }
        const std::string digits = item.substr(pos);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw ConfigError("bad ladder entry '" + item + "' in '" + text + "'");
        w.radius = std::stoi(digits);
        windows.push_back(w);
    }
    try {
        return ScaleLadder(std::move(windows));
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
}

std::string ScaleLadder::to_string() const {
    std::string out;
    for (std::size_t r = 0; r < windows_.size(); ++r) {
        if (r) out += ',';
        out += mcd::to_string(windows_[r]);
    }
    return out;
}

}  // namespace mcd
