#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "maxlab/error.hpp"
#include "maxlab/fraction.hpp"

namespace maxlab {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline int log2_exact(int n) {
    int k = 0;
    while ((1 << k) < n) ++k;
    return k;
}

namespace detail {

template <class T>
bool valid_cell(const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
        return std::isfinite(v) && v >= T(0);
    } else if constexpr (std::is_same_v<T, Fraction>) {
        return v.num() >= 0;
    } else {
        return v >= T(0);
    }
}

} // namespace detail

/// Square array of nonnegative values on unit cells [x, x+1) x [y, y+1),
/// origin at (0,0). The side is a power of two so the dyadic structure is
/// available at every level. Cells are stored row-major with row y = 0 first.
template <class T>
class BasicGrid {
public:
    using value_type = T;

    BasicGrid() : BasicGrid(1) {}

    explicit BasicGrid(int side, T fill = T(0)) : side_(side) {
        if (!is_power_of_two(side)) {
            throw GeometryError("grid side must be a power of two, got " + std::to_string(side));
        }
        if (!detail::valid_cell(fill)) {
            throw GeometryError("grid cells must be finite and nonnegative");
        }
        cells_.assign(static_cast<std::size_t>(side) * side, fill);
    }

    BasicGrid(int side, std::vector<T> cells) : side_(side), cells_(std::move(cells)) {
        if (!is_power_of_two(side)) {
            throw GeometryError("grid side must be a power of two, got " + std::to_string(side));
        }
        if (cells_.size() != static_cast<std::size_t>(side) * side) {
            throw GeometryError("grid expects " + std::to_string(side * side) + " cells, got " +
                                std::to_string(cells_.size()));
        }
        for (const auto& v : cells_) {
            if (!detail::valid_cell(v)) {
                throw GeometryError("grid cells must be finite and nonnegative");
            }
        }
    }

    int side() const { return side_; }
    std::size_t size() const { return cells_.size(); }

    const T& operator()(int x, int y) const { return cells_[index(x, y)]; }

    const T& at(int x, int y) const {
        if (x < 0 || y < 0 || x >= side_ || y >= side_) {
            throw BoundsError("cell (" + std::to_string(x) + "," + std::to_string(y) + ") outside grid");
        }
        return cells_[index(x, y)];
    }

    void set(int x, int y, T v) {
        if (x < 0 || y < 0 || x >= side_ || y >= side_) {
            throw BoundsError("cell (" + std::to_string(x) + "," + std::to_string(y) + ") outside grid");
        }
        if (!detail::valid_cell(v)) {
            throw GeometryError("grid cells must be finite and nonnegative");
        }
        cells_[index(x, y)] = v;
    }

    std::span<const T> cells() const { return cells_; }

    friend bool operator==(const BasicGrid&, const BasicGrid&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * side_ + static_cast<std::size_t>(x);
    }

    int side_;
    std::vector<T> cells_;
};

using Grid2D = BasicGrid<double>;
using IntGrid = BasicGrid<std::int64_t>;
using FractionGrid = BasicGrid<Fraction>;

/// Applies `fn` cellwise; `fn` must return a valid (nonnegative, finite) value.
template <class T, class Fn>
auto map_cells(const BasicGrid<T>& g, Fn&& fn) {
    using R = std::decay_t<decltype(fn(std::declval<const T&>()))>;
    std::vector<R> out;
    out.reserve(g.size());
    for (const auto& v : g.cells()) out.push_back(fn(v));
    return BasicGrid<R>(g.side(), std::move(out));
}

inline Grid2D to_double(const IntGrid& g) {
    return map_cells(g, [](std::int64_t v) { return static_cast<double>(v); });
}

inline Grid2D to_double(const FractionGrid& g) {
    return map_cells(g, [](const Fraction& v) { return v.to_double(); });
}

} // namespace maxlab
