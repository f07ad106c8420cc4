#include "corrosion/contour.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace corrosion {

namespace {

// Lattice edge: (node index, direction) with direction 0 = +x, 1 = +y.
using EdgeKey = std::pair<int, int>;

struct Segment {
    EdgeKey a;
    EdgeKey b;
};

} // namespace

std::vector<Polyline> marching_squares(const std::vector<double>& values, const std::vector<Point>& points, int nx,
                                       int ny, double level)
{
    auto above = [&](int idx) { return std::isfinite(values[idx]) && values[idx] >= level; };
    auto crossing = [&](const EdgeKey& e) -> Point {
        const int i0 = e.first;
        const int i1 = e.second == 0 ? i0 + 1 : i0 + nx;
        const double v0 = values[i0], v1 = values[i1];
        double r = 0.5;
        if (std::isfinite(v0) && std::isfinite(v1) && v0 != v1)
            r = std::clamp((level - v0) / (v1 - v0), 0.0, 1.0);
        return points[i0] + r * (points[i1] - points[i0]);
    };

    std::vector<Segment> segments;
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const int n00 = j * nx + i, n10 = n00 + 1, n01 = n00 + nx, n11 = n01 + 1;
            const int code = (above(n00) ? 1 : 0) | (above(n10) ? 2 : 0) | (above(n11) ? 4 : 0) |
                             (above(n01) ? 8 : 0);
            const EdgeKey bottom{n00, 0}, right{n10, 1}, top{n01, 0}, left{n00, 1};
            auto emit = [&](EdgeKey a, EdgeKey b) { segments.push_back({a, b}); };
            switch (code) {
            case 0:
            case 15:
                break;
            case 1:
            case 14:
                emit(left, bottom);
                break;
            case 2:
            case 13:
                emit(bottom, right);
                break;
            case 3:
            case 12:
                emit(left, right);
                break;
            case 4:
            case 11:
                emit(right, top);
                break;
            case 6:
            case 9:
                emit(bottom, top);
                break;
            case 7:
            case 8:
                emit(left, top);
                break;
            case 5:
            case 10: {
                // Saddle: resolve with the mean of the four corners.
                double mean = 0.0;
                int finite = 0;
                for (int n : {n00, n10, n11, n01}) {
                    if (std::isfinite(values[n])) {
                        mean += values[n];
                        ++finite;
                    }
                }
                const bool center_above = finite > 0 && mean / finite >= level;
                if ((code == 5) == center_above) {
                    emit(left, top);
                    emit(bottom, right);
                } else {
                    emit(left, bottom);
                    emit(right, top);
                }
                break;
            }
            default:
                break;
            }
        }
    }

    // Chain segments through shared lattice edges.
    std::multimap<EdgeKey, std::size_t> by_edge;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        by_edge.emplace(segments[s].a, s);
        by_edge.emplace(segments[s].b, s);
    }
    std::vector<bool> used(segments.size(), false);
    auto next_segment = [&](const EdgeKey& e) -> std::ptrdiff_t {
        auto [lo, hi] = by_edge.equal_range(e);
        for (auto it = lo; it != hi; ++it)
            if (!used[it->second])
                return static_cast<std::ptrdiff_t>(it->second);
        return -1;
    };
    auto walk = [&](EdgeKey from, std::vector<EdgeKey>& chain) {
        for (;;) {
            const std::ptrdiff_t s = next_segment(from);
            if (s < 0)
                return;
            used[s] = true;
            from = segments[s].a == from ? segments[s].b : segments[s].a;
            chain.push_back(from);
        }
    };

    std::vector<Polyline> lines;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s])
            continue;
        used[s] = true;
        std::vector<EdgeKey> forward{segments[s].a, segments[s].b};
        walk(segments[s].b, forward);
        std::vector<EdgeKey> backward;
        if (forward.back() != forward.front())
            walk(segments[s].a, backward);
        Polyline line;
        for (auto it = backward.rbegin(); it != backward.rend(); ++it)
            line.push_back(crossing(*it));
        for (const auto& e : forward)
            line.push_back(crossing(e));
        lines.push_back(std::move(line));
    }
    return lines;
}

} // namespace corrosion
