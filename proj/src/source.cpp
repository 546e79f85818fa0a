#include "brdffield/source.hpp"

#include <cmath>

#include "brdffield/errors.hpp"

namespace brdffield {

namespace {
constexpr double kBand = 1e-3;

bool in_band(const SphericalDir& d) {
  return d.theta >= kBand && d.theta <= kHalfPi - kBand;
}
}  // namespace

std::optional<Rgb> source_eval(const BrdfSource& src, const DirectionPair& p) {
  if (const auto* m = std::get_if<MerlBrdf>(&src)) return merl_eval(*m, p);
  if (const auto* a = std::get_if<AnalyticBrdf>(&src))
    return analytic_eval(*a, p);
  return brdf_eval(std::get<FieldModel>(src), p);
}

bool source_isotropic(const BrdfSource& src) {
  // Trained fields consume phi_h through the embedding, so they are not
  // declared isotropic even when fitted to isotropic data.
  return !std::holds_alternative<FieldModel>(src);
}

const FieldModel* source_antiderivative_field(const BrdfSource& src) {
  const auto* f = std::get_if<FieldModel>(&src);
  return (f && f->mode == FieldMode::kAntiderivative) ? f : nullptr;
}

SphericalDir sample_cosine_hemisphere(Rng& rng) {
  const double theta = std::asin(std::sqrt(rng.uniform()));
  return {theta, rng.uniform(0.0, kTwoPi)};
}

std::vector<BrdfSample> sample_dataset(const BrdfSource& src, int n,
                                       std::uint64_t seed) {
  if (n <= 0) throw DataError("sample_dataset: sample count must be positive");
  std::vector<BrdfSample> out;
  out.reserve(n);
  Rng rng(seed);

  if (const auto* m = std::get_if<MerlBrdf>(&src)) {
    std::vector<int> valid;
    std::vector<DirectionPair> pairs;
    for (int ih = 0; ih < MerlBrdf::kNThetaH; ++ih)
      for (int id = 0; id < MerlBrdf::kNThetaD; ++id)
        for (int ip = 0; ip < MerlBrdf::kNPhiD; ++ip) {
          const MerlIndex idx{ih, id, ip};
          const int cell = idx.cell();
          if (m->stored(0, cell) < 0.0 || m->stored(1, cell) < 0.0 ||
              m->stored(2, cell) < 0.0)
            continue;
          const auto p = rusink_to_io(merl_cell_coords(idx));
          if (!p || !in_band(p->wi) || !in_band(p->wo)) continue;
          valid.push_back(cell);
          pairs.push_back(*p);
        }
    if (valid.empty()) throw DataError("sample_dataset: source has no valid cells");
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(rng.next_below(valid.size()));
      BrdfSample s;
      s.pair = pairs[k];
      s.rusink = io_to_rusink(s.pair);
      Rgb v;
      for (int c = 0; c < 3; ++c)
        v[c] = m->stored(c, valid[k]) * MerlBrdf::kScale[c];
      s.value = v;
      out.push_back(s);
    }
    return out;
  }

  for (int i = 0; i < n; ++i) {
    DirectionPair p;
    do {
      p.wi = sample_cosine_hemisphere(rng);
      p.wo = sample_cosine_hemisphere(rng);
    } while (!in_band(p.wi) || !in_band(p.wo));
    BrdfSample s;
    s.pair = p;
    s.rusink = io_to_rusink(p);
    const auto v = source_eval(src, p);
    s.value = *v;
    out.push_back(s);
  }
  return out;
}

MerlBrdf rasterize_to_merl(const AnalyticBrdf& a) {
  MerlBrdf m;
  m.table.assign(3ull * MerlBrdf::kCells, -1.0);
  for (int ih = 0; ih < MerlBrdf::kNThetaH; ++ih)
    for (int id = 0; id < MerlBrdf::kNThetaD; ++id)
      for (int ip = 0; ip < MerlBrdf::kNPhiD; ++ip) {
        const MerlIndex idx{ih, id, ip};
        const auto p = rusink_to_io(merl_cell_coords(idx));
        if (!p) continue;
        const Rgb v = analytic_eval(a, *p);
        for (int c = 0; c < 3; ++c)
          m.stored(c, idx.cell()) = v[c] / MerlBrdf::kScale[c];
      }
  return m;
}

}  // namespace brdffield
