#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "maxlab/grid.hpp"

namespace maxlab {

/// w(E) for E = {cells where pred(x, y)}.
double weighted_measure(const Grid2D& w, const std::function<bool(int, int)>& pred);

/// w({field > t}), strict superlevel set.
double superlevel_measure(const Grid2D& w, const Grid2D& field, double t);

/// (sum f^p w)^(1/p); p >= 1.
double lp_norm(const Grid2D& f, const Grid2D& w, double p);

struct ApStarEstimate {
    double p = 1.0;
    /// +infinity when w vanishes somewhere.
    double value = 1.0;
    std::int64_t basis_scanned = 0;
};

/// Max over every axis-parallel cell rectangle (or every product of dyadic
/// intervals) of avg(w) * avg(w^(-1/(p-1)))^(p-1), or avg(w) / min(w) for
/// p = 1. Exhaustive scan, meant for side <= 64.
ApStarEstimate apstar_constant(const Grid2D& w, double p, bool restrict_dyadic);

/// sum (f/t) (1 + log+(f/t)) W, natural logarithm.
double llogl_functional(const Grid2D& f, const Grid2D& W, double t);

enum class WeightKind { Constant, Checkerboard, Power, Spike, Lognormal };

std::string to_string(WeightKind kind);

struct WeightSpec {
    WeightKind kind = WeightKind::Constant;
    double value = 1.0;          // constant
    double low = 1.0;            // checkerboard, cell (0,0)
    double high = 4.0;           // checkerboard
    double exponent = 1.0;       // power: |x - center|^exponent, exponent > -2
    double center_x = 0.0;       // power
    double center_y = 0.0;       // power
    int spike_x = 0;             // spike
    int spike_y = 0;             // spike
    double epsilon = 1e-9;       // spike background
    std::uint64_t seed = 0;      // lognormal
    double sigma = 1.0;          // lognormal

    /// Canonical "kind:args" form accepted by parse_weight_spec.
    std::string describe() const;
};

/// Parses the CLI forms, e.g. "constant:1", "checkerboard:1,4",
/// "power:a=-1", "spike:0,0", "lognormal:seed=42,sigma=1.5". Arguments are
/// positional or key=value.
WeightSpec parse_weight_spec(const std::string& text);

/// Deterministic for a given spec; lognormal cells are exp(sigma * Z) with Z
/// drawn from the seeded generator in row-major order.
Grid2D make_weight(const WeightSpec& spec, int side);

} // namespace maxlab
