#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxlab/dyadic.hpp"
#include "maxlab/fraction.hpp"
#include "maxlab/geometry.hpp"
#include "maxlab/grid.hpp"
#include "maxlab/rng.hpp"

namespace maxlab {

/// Outcome of one invariant checker. `witness` names the first offending
/// object when `passed` is false.
struct CheckReport {
    std::string name;
    bool passed = true;
    std::int64_t checked = 0;
    std::string witness;
    std::string detail;
};

// ---- dyadic selection (long sides along x1) ----

struct DyadicStep {
    std::size_t candidate = 0;  // index into input
    std::int64_t overlap = 0;   // |R ∩ union of rectangles selected so far|, in cells
    std::int64_t area = 0;
    bool selected = false;
};

struct DyadicSelection {
    int side = 1;
    Fraction threshold{1, 3};
    std::vector<DyadicRect> input;
    std::vector<std::size_t> order;     // processing order: |P1| nonincreasing, ties by input index
    std::vector<std::size_t> selected;  // input indices, in selection order
    std::vector<DyadicStep> trace;      // one entry per processed candidate
};

/// Greedy pass: a candidate is kept iff its overlap with the union of the
/// rectangles kept so far is < threshold * |R|. Exact cell counts.
DyadicSelection select_dyadic(const std::vector<DyadicRect>& family, int side, Fraction threshold = Fraction(1, 3));

/// Ordering, the strict overlap bound for kept rectangles and a violating
/// prefix for every rejected one, all recomputed from scratch.
CheckReport check_dyadic_certificates(const DyadicSelection& sel);

/// Dyadic-square maximal function of the indicator of the kept union is at
/// least the threshold on every cell of every input rectangle.
CheckReport check_covering_inclusion(const DyadicSelection& sel);

/// |X_{i,n}| * 3^(n-1) <= |R_i| for every kept R_i and every n >= 1 up to the
/// largest multiplicity seen.
CheckReport multiplicity_bound_check(const DyadicSelection& sel);

/// For kept k after j with R_k ∩ R_j nonempty: the intersection is
/// P1(R_k) x P2(R_j) and |P2(R_k) ∩ P2(R_j)| * 3 < |P2(R_k)|.
CheckReport check_structural_fact(const DyadicSelection& sel);

struct MultiplicityField {
    Grid2D mu;       // sum_i U(R_i)/|R_i| 1_{R_i}
    IntGrid count;   // sum_i 1_{R_i}
};

MultiplicityField multiplicity_field(const DyadicSelection& sel, const Grid2D& U);

std::vector<DyadicRect> random_dyadic_family(Rng& rng, int side, int count);

/// Thin rectangles stacked in nested columns at the left edge, every
/// admissible shape down to single cells.
std::vector<DyadicRect> nested_column_family(int side);

// ---- directional selection ----

struct DirectionalStep {
    std::size_t candidate = 0;
    double overlap_sum = 0.0;  // sum of pairwise areas with the rectangles kept so far
    double area = 0.0;
    bool selected = false;
};

struct DirectionalSelection {
    double threshold = 0.5;
    double expansion = 5.0;
    std::vector<RotatedRect> input;
    std::vector<std::size_t> order;  // L nonincreasing, ties by input index
    std::vector<std::size_t> selected;
    std::vector<DirectionalStep> trace;
};

/// Absolute tolerance on areas; decisions this close to the threshold reject.
inline constexpr double kAreaTolerance = 1e-9;

/// Greedy pass keeping a candidate iff the sum of its pairwise intersection
/// areas with the kept rectangles is <= threshold * |R| (strictly below by
/// more than kAreaTolerance). Throws SectorError if the directions of the
/// family span more than pi/4.
DirectionalSelection select_directional(const std::vector<RotatedRect>& family, double threshold = 0.5);

CheckReport check_directional_certificates(const DirectionalSelection& sel);

/// Number of expanded kept rectangles containing each cell center.
IntGrid build_Y(const DirectionalSelection& sel, int side);

struct DirectionalCoveringReport {
    int N = 0;
    std::int64_t cells_checked = 0;
    double min_mq_y = 0.0;      // min of M_Q Y over cells of input rectangles
    double min_scaled = 0.0;    // min_mq_y * log N
    int witness_x = -1;
    int witness_y = -1;
};

/// Cells of an input rectangle are those whose center it contains.
DirectionalCoveringReport check_directional_covering(const DirectionalSelection& sel, int side, int N);

std::vector<RotatedRect> random_directional_family(Rng& rng, int side, int N, int count);

// ---- sector lemma geometry ----

struct Lemma31Instance {
    RotatedRect alpha;
    RotatedRect beta;
    int N;
};

struct Lemma31Result {
    bool hypothesis_met = false;
    std::string reason;       // why the hypothesis failed, if it did
    int k = -1;
    int M = 0;
    double omega_k = 0.0;
    double angle = 0.0;       // |theta_alpha - theta_beta| folded to [0, pi/2]
    double s_alpha = 0.0;
    double lhs = 0.0;         // |R_beta ∩ R_alpha| / |R_alpha|
    double rhs_min = 0.0;     // min over sample points of |R_beta* ∩ Q| / |Q|
    Point worst_x;
    bool passed = true;       // lhs <= 32 * rhs_min + 1e-9 (vacuous without hypothesis)
};

/// x runs over a samples x samples grid of interior points of R_alpha.
Lemma31Result check_lemma31(const Lemma31Instance& inst, int samples = 5);

/// R_beta through a random point of R_alpha, directions within one sector of
/// Sigma_N, scales drawn from the default scale grid of `side`, L_beta >= L_alpha.
Lemma31Instance random_lemma31_instance(Rng& rng, int N, int side);

// ---- serialization ----

std::string family_to_json(const std::vector<DyadicRect>& family, int side);
std::string family_to_json(const std::vector<RotatedRect>& family, int side, int N);

struct DyadicFamilyFile {
    int side = 1;
    std::vector<DyadicRect> rects;
};

struct DirectionalFamilyFile {
    int side = 1;
    int N = 0;
    std::vector<RotatedRect> rects;
};

/// {"side": n, "rects": [[x0, x1, y0, y1], ...]}; every rectangle must be a
/// product of dyadic intervals (ParseError) with |P1| >= |P2| (OrientationError).
DyadicFamilyFile parse_dyadic_family(const std::string& json_text);

/// {"side": n, "N": N, "rects": [{"cx","cy","L","l", "theta" | "j"}, ...]},
/// where "j" is a direction index in Sigma_N.
DirectionalFamilyFile parse_directional_family(const std::string& json_text);

std::string selection_to_json(const DyadicSelection& sel, const std::vector<CheckReport>& checks);
std::string selection_to_json(const DirectionalSelection& sel, const std::vector<CheckReport>& checks,
                              const DirectionalCoveringReport* covering);

} // namespace maxlab
