#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "maxlab/fraction.hpp"
#include "maxlab/grid.hpp"
#include "maxlab/grid_io.hpp"

namespace maxlab {

/// Average type for a cell type: doubles stay doubles, integer masses become
/// exact fractions mass/area.
template <class T>
struct AverageOf {
    using type = double;
    static double make(double sum, std::int64_t area) { return sum / static_cast<double>(area); }
};

template <>
struct AverageOf<std::int64_t> {
    using type = Fraction;
    static Fraction make(std::int64_t sum, std::int64_t area) { return Fraction::unreduced(sum, area); }
};

template <class T>
using average_t = typename AverageOf<T>::type;

// Values of M_Q over cell-aligned axis-parallel squares inside the grid (or
// only dyadic squares). The value of a cell is the sup over basis squares
// containing its center. Squares sticking out of the grid never beat a square
// shifted back inside, so the restriction loses nothing.
template <class T>
BasicGrid<average_t<T>> hl_maximal_values(const BasicGrid<T>& g, bool dyadic);

// Values of M_R over all cell-aligned axis-parallel rectangles.
template <class T>
BasicGrid<average_t<T>> strong_maximal_values(const BasicGrid<T>& g);

extern template BasicGrid<double> hl_maximal_values<double>(const Grid2D&, bool);
extern template BasicGrid<Fraction> hl_maximal_values<std::int64_t>(const IntGrid&, bool);
extern template BasicGrid<double> strong_maximal_values<double>(const Grid2D&);
extern template BasicGrid<Fraction> strong_maximal_values<std::int64_t>(const IntGrid&);

/// Sigma_N = {(cos 2 pi j/N, sin 2 pi j/N)}, N > 10, with the partition into
/// eight sectors j in [kN/8, (k+1)N/8) whose angular diameter stays below pi/4.
class DirectionSet {
public:
    explicit DirectionSet(int n_directions);

    int size() const { return n_; }
    double angle(int j) const;
    std::vector<std::pair<double, double>> vectors() const;

    int sector_of(int j) const { return (8 * j) / n_; }
    const std::vector<std::vector<int>>& sectors() const { return sectors_; }

    /// Indices giving each distinct rectangle orientation once (a direction
    /// and its antipode describe the same rectangles).
    std::vector<int> orientation_indices() const;

private:
    int n_;
    std::vector<std::vector<int>> sectors_;
};

/// (L, l) with l <= L.
struct ScalePair {
    double length = 1.0;
    double width = 1.0;

    friend bool operator==(const ScalePair&, const ScalePair&) = default;
};

/// L in {1, 2, 4, ..., side}, aspect L/l in {1, 2, 4, ..., side}, l >= 1.
std::vector<ScalePair> default_scale_grid(int side);

std::string describe_scales(std::span<const ScalePair> scales);

/// Parses "L:l,L:l,..." (e.g. "4:1,8:2").
std::vector<ScalePair> parse_scales(const std::string& text);

enum class OperatorKind { HlAxis, HlDyadic, Strong, Directional, ComposedW, ComposedWDirectional };

std::string to_string(OperatorKind kind);

struct MaximalField {
    OperatorKind kind;
    Metadata meta;
    Grid2D values;
};

MaximalField hl_maximal(const Grid2D& g, bool dyadic);
MaximalField strong_maximal(const Grid2D& g);

/// Lower approximation of M_Sigma: the max over orientations in `dirs`, scale
/// pairs, and a translation lattice of stride l / (2 * refinement), anchored at
/// the origin in the rotated frame, of rectangle averages, taken over
/// rectangles whose closed hull contains the cell center. g is zero outside the
/// grid and averages divide by the full |R|. Each L and stride must be a
/// dyadic rational; refinement is a power of two.
MaximalField directional_maximal(const Grid2D& g, const DirectionSet& dirs, std::span<const ScalePair> scales,
                                 int refinement = 1);

/// The grid-independent part of directional_maximal (lattice geometry and
/// cell clipping) for one side, direction set and scale grid. Immutable and
/// shareable across threads.
class DirectionalPlan {
public:
    DirectionalPlan(int side, const DirectionSet& dirs, std::span<const ScalePair> scales, int refinement = 1);
    int side() const;
    MaximalField apply(const Grid2D& g) const;

    struct Orientation;
    struct Impl;

private:
    std::shared_ptr<const Impl> impl_;
};

/// W = M_R M_Q w.
MaximalField compose_W(const Grid2D& w);

/// W = M_Sigma M_Q w.
MaximalField compose_W(const Grid2D& w, const DirectionSet& dirs, std::span<const ScalePair> scales, int refinement = 1);

} // namespace maxlab
