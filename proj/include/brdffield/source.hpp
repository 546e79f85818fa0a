#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "brdffield/analytic.hpp"
#include "brdffield/field.hpp"
#include "brdffield/merl.hpp"
#include "brdffield/rng.hpp"

namespace brdffield {

// One supervised reflectance observation.
struct BrdfSample {
  DirectionPair pair;
  RusinCoords rusink;
  Rgb value = Rgb::Zero();
};

// Anything that can stand in for a BRDF: a measured table, a closed-form
// oracle, or a trained field; all evaluated through the same interface.
using BrdfSource = std::variant<MerlBrdf, AnalyticBrdf, FieldModel>;

// Empty result marks an invalid measured cell; oracles and fields always
// produce a value.
std::optional<Rgb> source_eval(const BrdfSource& src, const DirectionPair& p);

bool source_isotropic(const BrdfSource& src);

// Non-null when the source is an antiderivative field (closed-form
// hemisphere integrals apply).
const FieldModel* source_antiderivative_field(const BrdfSource& src);

// Cosine-weighted hemisphere direction.
SphericalDir sample_cosine_hemisphere(Rng& rng);

// Training-set sampling: uniform over valid cells for measured tables,
// independent cosine-weighted directions otherwise. Polar angles keep a
// 1e-3 guard band away from 0 and pi/2 (the scaled-derivative denominator
// is singular there). Deterministic given the seed.
std::vector<BrdfSample> sample_dataset(const BrdfSource& src, int n,
                                       std::uint64_t seed);

// Evaluates the oracle at cell-center coordinates; geometrically
// unreachable cells are stored as the negative invalid marker.
MerlBrdf rasterize_to_merl(const AnalyticBrdf& a);

}  // namespace brdffield
