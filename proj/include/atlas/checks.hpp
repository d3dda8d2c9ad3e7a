#pragma once

// Batch checks behind the command line tool: each runs one family of
// pointwise comparisons and returns counts plus the first disagreement.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atlas/epw.hpp"
#include "atlas/interpolate.hpp"
#include "atlas/lagloci.hpp"
#include "atlas/quadloci.hpp"
#include "atlas/synth.hpp"

namespace atlas {

struct Tally {
  std::uint64_t checked = 0;
  std::uint64_t disagreements = 0;
  std::optional<std::string> first_disagreement;

  void record(bool agree, const std::string& where) {
    ++checked;
    if (agree) return;
    ++disagreements;
    if (!first_disagreement) first_disagreement = where;
  }
  bool ok() const { return disagreements == 0; }
};

inline std::uint64_t saturating_power(std::uint64_t q, std::size_t e, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > cap / q) return cap + 1;
    r *= q;
  }
  return r;
}

// The symmetric m x m matrix whose upper triangle is the base-q expansion of idx.
template <FiniteFieldType F>
Mat<F> symmetric_from_index(const F& f, std::size_t m, std::uint64_t idx) {
  Mat<F> s(f, m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      s(i, j) = s(j, i) = f.element(idx % f.size());
      idx /= f.size();
    }
  return s;
}

template <FieldType F>
std::string mat_to_string(const Mat<F>& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += i ? ";" : "";
    for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? "," : "") + m.field().to_string(m(i, j));
  }
  return s + "]";
}

// ---------------------------------------------------------------------------
// Veronese model against the cover signature

struct VeroneseSummary {
  std::size_t size = 0;
  std::uint64_t forms = 0;  // symmetric forms of rank <= 1
  std::uint64_t split = 0, inert = 0, ramified = 0;
  Tally tally;
};

// Every symmetric form of rank <= 1 and size k + 1, queried at corank k.
template <FiniteFieldType F>
VeroneseSummary veronese_check(const F& f, std::size_t k, std::uint64_t budget) {
  const std::size_t m = k + 1;
  const std::uint64_t total = saturating_power(f.size(), m * (m + 1) / 2, budget);
  if (total > budget) throw SizeError("veronese check needs more than " + std::to_string(budget) + " forms");
  VeroneseSummary out;
  out.size = m;
  for (std::uint64_t i = 0; i < total; ++i) {
    const Mat<F> q = symmetric_from_index(f, m, i);
    if (rank(q) > 1) continue;
    ++out.forms;
    const auto root = veronese_square_root(q);
    const auto sig = assess_form(q, k).signature;
    (sig == Signature::Split ? out.split : sig == Signature::Inert ? out.inert : out.ramified)++;
    const bool agree = root.ramification ? sig == Signature::Ramified : root.form.has_value() == (sig == Signature::Split);
    out.tally.record(agree, mat_to_string(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ruling rationality against the signed discriminant

struct SteinSummary {
  std::size_t size = 0;
  bool exhaustive = true;
  std::uint64_t forms = 0, nondegenerate = 0, split = 0, inert = 0;
  Tally tally;
};

template <FiniteFieldType F>
SteinSummary stein_check(const F& f, std::size_t size, std::uint64_t budget, Rng& rng, std::uint64_t samples) {
  if (size == 0 || size % 2 == 1) throw ShapeError("ruling check needs an even size");
  SteinSummary out;
  out.size = size;
  const std::uint64_t total = saturating_power(f.size(), size * (size + 1) / 2, budget);
  out.exhaustive = total <= budget;
  const std::uint64_t count = out.exhaustive ? total : samples;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Mat<F> q = out.exhaustive ? symmetric_from_index(f, size, i) : random_symmetric(f, size, rng);
    ++out.forms;
    if (f.is_zero(det(q))) continue;
    ++out.nondegenerate;
    const auto rulings = enumerate_isotropic_rulings(q);
    const auto sig = signature_from_class<F>(square_class(f, signed_discriminant(q)));
    (sig == Signature::Split ? out.split : out.inert)++;
    out.tally.record(rulings.rational == (sig == Signature::Split), mat_to_string(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corank stratification of a family on a whole chart

struct StratumRow {
  std::size_t corank = 0;
  std::uint64_t points = 0, split = 0, inert = 0, smooth = 0;
};

struct StratifySummary {
  std::size_t m = 0, nvars = 0;
  std::uint64_t points = 0;
  std::vector<StratumRow> strata;  // by corank
  Tally branch;                    // Ramified iff corank > k, for k = corank - 1
};

template <FiniteFieldType F>
StratifySummary stratify(const QuadraticFamily<F>& qf, std::uint64_t budget) {
  const F& f = qf.field();
  const std::uint64_t total = saturating_power(f.size(), qf.nvars, budget);
  if (total > budget) throw SizeError("chart has more than " + std::to_string(budget) + " points");
  StratifySummary out;
  out.m = qf.m;
  out.nvars = qf.nvars;
  out.strata.resize(qf.m + 1);
  for (std::size_t c = 0; c <= qf.m; ++c) out.strata[c].corank = c;
  std::vector<typename F::value_type> s(qf.nvars);
  for (std::uint64_t i = 0; i < total; ++i) {
    std::uint64_t t = i;
    for (auto& x : s) {
      x = f.element(t % f.size());
      t /= f.size();
    }
    ++out.points;
    const auto a = assess_point(qf, 0, s);
    auto& row = out.strata[a.corank];
    ++row.points;
    const auto own = assess_point(qf, a.corank, s).signature;
    (own == Signature::Split ? row.split : row.inert)++;
    if (expected_smoothness_at(qf, a.corank, s)) ++row.smooth;
    if (a.corank > 0)
      out.branch.record(assess_point(qf, a.corank - 1, s).signature == Signature::Ramified, point_to_string(f, s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symmetroids

struct SymmetroidSummary {
  std::size_t size = 0, nvars = 0;
  std::size_t degree = 0, expected_degree = 0;
  std::size_t verified_points = 0;
  bool exhaustive = false;
  std::vector<std::uint64_t> histogram;  // corank counts on the chart (exhaustive runs)
  Tally smooth;                          // nonzero gradient at corank-one points
  Tally branch;                          // Ramified at k = 1 iff corank >= 2
};

template <FiniteFieldType F>
SymmetroidSummary symmetroid_check(const std::vector<Mat<F>>& mats, Rng& rng, std::uint64_t budget,
                                   std::size_t smooth_points) {
  const auto qf = symmetroid_family(mats);
  const F& f = qf.field();
  SymmetroidSummary out;
  out.size = qf.m;
  out.nvars = qf.nvars;
  out.expected_degree = qf.m;
  const auto interp = interpolate<F>(
      f, qf.nvars, static_cast<unsigned>(qf.m), [&](const std::vector<typename F::value_type>& x) { return det(qf.at(x)); },
      rng, 1000);
  out.degree = interp.poly.is_zero() ? 0 : static_cast<std::size_t>(interp.poly.degree());
  out.verified_points = interp.verified_points;
  const auto grad = partial_derivatives(interp.poly);

  auto visit = [&](const std::vector<typename F::value_type>& s, std::size_t c) {
    if (c >= 1) out.branch.record((assess_point(qf, 1, s).signature == Signature::Ramified) == (c >= 2),
                                  point_to_string(f, s));
    if (c == 1 && out.smooth.checked < smooth_points) {
      bool nonzero = false;
      for (const auto& g : grad) nonzero = nonzero || !f.is_zero(g.eval(s));
      out.smooth.record(nonzero && expected_smoothness_at(qf, 1, s), point_to_string(f, s));
    }
  };

  const std::uint64_t total = saturating_power(f.size(), qf.nvars, budget);
  out.exhaustive = total <= budget;
  out.histogram.assign(qf.m + 1, 0);
  std::vector<typename F::value_type> s(qf.nvars);
  if (out.exhaustive) {
    for (std::uint64_t i = 0; i < total; ++i) {
      std::uint64_t t = i;
      for (auto& x : s) {
        x = f.element(t % f.size());
        t /= f.size();
      }
      const std::size_t c = qf.m - rank(qf.at(s));
      ++out.histogram[c];
      visit(s, c);
    }
  }
  // corank-one points on random lines
  for (std::size_t tries = 0; out.smooth.checked < smooth_points && tries < 100 * smooth_points; ++tries) {
    std::vector<typename F::value_type> p(qf.nvars), d(qf.nvars);
    for (std::size_t i = 0; i < qf.nvars; ++i) {
      p[i] = random_element(f, rng);
      d[i] = random_element(f, rng);
    }
    for (std::uint64_t t = 0; t < f.size() && out.smooth.checked < smooth_points; ++t) {
      for (std::size_t i = 0; i < qf.nvars; ++i) s[i] = f.add(p[i], f.mul(f.element(t), d[i]));
      if (!f.is_zero(interp.poly.eval(s))) continue;
      const std::size_t c = qf.m - rank(qf.at(s));
      if (c == 1) visit(s, c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lagrangian reduction and conversion on random linear pairs

struct ReductionSummary {
  std::size_t n = 0, nvars = 0;
  std::uint64_t points = 0, skipped = 0;
  std::vector<std::uint64_t> coranks;  // histogram of coranks checked
  Tally coranks_kept, signatures_kept;
};

template <FiniteFieldType F>
ReductionSummary reduction_check(const LagPair<F>& pair, Rng& rng, std::size_t points) {
  const F& f = pair.field();
  ReductionSummary out;
  out.n = pair.n();
  out.nvars = pair.nvars();
  out.coranks.assign(out.n + 1, 0);
  for (const auto& s : chart_sample(f, pair.nvars(), points, rng)) {
    ++out.points;
    PointPair<F> pp{pair.space().omega, pair.a1().eval(s), pair.a2().eval(s), f.one(), f.one()};
    const std::size_t k = point_corank(pp);
    const std::size_t room = out.n - k;
    const std::size_t r2 = room == 0 ? 0 : rng.below(room + 1);
    const std::size_t r1 = room - r2 == 0 ? 0 : rng.below(room - r2 + 1);
    const auto data = random_reduction(pp, r1, r2, rng);
    if (!data) {
      ++out.skipped;
      continue;
    }
    const std::string where = point_to_string(f, s) + " r1=" + std::to_string(r1) + " r2=" + std::to_string(r2);
    try {
      const auto red = reduce_point(pp, data->i1, data->i2, where);
      ++out.coranks[k];
      out.coranks_kept.record(point_corank(red.pair) == k, where);
      out.signatures_kept.record(lag_signature_at(red.pair, k) == lag_signature_at(pp, k), where);
    } catch (const HypothesisViolated&) {
      ++out.skipped;
    }
  }
  return out;
}

struct ConversionSummary {
  std::size_t n = 0, nvars = 0;
  bool symmetric = false;
  std::uint64_t points = 0, not_transverse = 0;
  Tally coranks, signatures;
};

template <FiniteFieldType F>
ConversionSummary conversion_check(const LagPair<F>& pair, const Mat<F>& a3, Rng& rng, std::size_t points) {
  const F& f = pair.field();
  ConversionSummary out;
  out.n = pair.n();
  out.nvars = pair.nvars();
  out.symmetric = lag_to_quad(pair, PolyMatrix<F>::constant(a3, pair.nvars()), rng, 0).family.gram.is_symmetric();
  for (const auto& s : chart_sample(f, pair.nvars(), points, rng)) {
    ++out.points;
    const auto pp = pair.at(s);
    try {
      const auto pq = lag_to_quad_at(pp, a3);
      const std::size_t k = point_corank(pp);
      out.coranks.record(out.n - rank(pq.q) == k, point_to_string(f, s));
      out.signatures.record(corrected_quad_signature(pq, k) == lag_signature_at(pp, k), point_to_string(f, s));
    } catch (const NotTransverse&) {
      ++out.not_transverse;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// EPW

inline std::size_t forbidden_corank(Flavor fl) { return fl == Flavor::Z ? 5 : 4; }

struct DiscardedSeed {
  std::uint64_t seed = 0;
  std::string reason;
};

inline std::uint64_t resample_seed(std::uint64_t seed, std::size_t attempt) { return seed + 1000003ULL * attempt; }

inline constexpr std::size_t kGroebnerScreenBudget = 20000;

// Rational enumeration of P(A) when it fits the budget.
template <FiniteFieldType F>
bool point_screen_fits(const F& f, std::uint64_t budget) {
  const std::uint64_t cap = budget * (f.size() - 1) + 1;
  return saturating_power(f.size(), 10, cap) <= cap;
}

template <FiniteFieldType F>
struct ScreenedCensus {
  std::uint64_t seed = 0;  // the seed finally used
  std::optional<ScreenReport<F>> screen;
  std::optional<GeometricScreen> geometric;  // used when the point screen does not fit
  CensusReport<F> census;
  std::vector<DiscardedSeed> discarded;
};

// Screens the graph Lagrangian of a seed: rational points when they fit the
// budget, otherwise P(A) ∩ Gr(3,6) over the algebraic closure. Returns the
// discard reason, if any.
template <FiniteFieldType F>
std::optional<std::string> screen_seed(const EpwLagrangian<F>& a, std::uint64_t budget,
                                       std::optional<ScreenReport<F>>& screen, std::optional<GeometricScreen>& geometric,
                                       unsigned threads = thread_count()) {
  screen.reset();
  geometric.reset();
  const F& f = a.basis.field();
  if (point_screen_fits(f, budget)) {
    screen = decomposable_screen(a, budget, threads);
    if (screen->flagged > 0) return std::to_string(screen->flagged) + " rational decomposable vectors";
    return std::nullopt;
  }
  geometric = geometric_decomposable_screen(a, kGroebnerScreenBudget);
  if (!geometric->empty) return "decomposable vectors on chart " + std::to_string(*geometric->chart);
  return std::nullopt;
}

// Census of a graph Lagrangian drawn from the seed. A seed failing the screen,
// or whose census has a nonempty forbidden bucket, is discarded and redrawn
// at most max_resamples times.
template <FiniteFieldType F>
ScreenedCensus<F> screened_census(const F& f, Flavor fl, std::uint64_t seed, std::uint64_t budget,
                                  std::size_t max_resamples = 2, unsigned threads = thread_count()) {
  ScreenedCensus<F> out;
  for (std::size_t attempt = 0;; ++attempt) {
    out.seed = resample_seed(seed, attempt);
    const auto a = random_graph_lagrangian(f, out.seed);
    const bool last = attempt == max_resamples;
    if (auto why = screen_seed(a, budget, out.screen, out.geometric, threads); why && !last) {
      out.discarded.push_back({out.seed, *why});
      continue;
    }
    out.census = census(a, fl, budget, threads);
    const std::uint64_t bad = out.census.at_least(forbidden_corank(fl));
    if (bad > 0 && !last) {
      out.discarded.push_back({out.seed, std::to_string(bad) + " points of corank >= " +
                                             std::to_string(forbidden_corank(fl))});
      continue;
    }
    return out;
  }
}

// First seed in the resample chain whose Lagrangian passes the screen.
template <FiniteFieldType F>
struct ScreenedSeed {
  std::uint64_t seed = 0;
  bool passed = false;
  std::optional<ScreenReport<F>> screen;
  std::optional<GeometricScreen> geometric;
  std::vector<DiscardedSeed> discarded;
};

template <FiniteFieldType F>
ScreenedSeed<F> screened_seed(const F& f, std::uint64_t seed, std::uint64_t budget, std::size_t max_resamples = 2) {
  ScreenedSeed<F> out;
  for (std::size_t attempt = 0; attempt <= max_resamples; ++attempt) {
    out.seed = resample_seed(seed, attempt);
    const auto why = screen_seed(random_graph_lagrangian(f, out.seed), budget, out.screen, out.geometric);
    if (!why) {
      out.passed = true;
      return out;
    }
    out.discarded.push_back({out.seed, *why});
  }
  return out;
}

// Points of the Y chart v0 = 1 where the pairing determinant vanishes, found
// as roots along random lines.
template <FiniteFieldType F>
std::vector<Mat<F>> sextic_points(const EpwContext<F>& ctx, std::size_t want, Rng& rng) {
  const F& f = ctx.field();
  std::vector<Mat<F>> out;
  std::vector<typename F::value_type> x0(5), d(5), x(5);
  for (std::size_t tries = 0; out.size() < want && tries < 100 * want + 100; ++tries) {
    for (std::size_t i = 0; i < 5; ++i) {
      x0[i] = random_element(f, rng);
      d[i] = random_element(f, rng);
    }
    for (std::uint64_t t = 0; t < f.size() && out.size() < want; ++t) {
      for (std::size_t i = 0; i < 5; ++i) x[i] = f.add(x0[i], f.mul(f.element(t), d[i]));
      if (f.is_zero(chart_value(ctx, Flavor::Y, x))) out.push_back(chart_datum(Flavor::Y, x, f));
    }
  }
  return out;
}

template <FieldType F>
struct SexticSummary {
  ChartDeterminant<F> chart;
  Tally vanishing;  // det(x) = 0 iff corank >= 1
  std::uint64_t on_hypersurface = 0;
};

// Interpolates the Y chart determinant and compares its zero set with the
// corank on random points and on points of the hypersurface.
template <FiniteFieldType F>
SexticSummary<F> sextic_check(const EpwLagrangian<F>& a, Rng& rng, std::size_t points) {
  const EpwContext<F> ctx(a);
  const F& f = ctx.field();
  SexticSummary<F> out{chart_determinant(a, Flavor::Y, rng), {}, 0};
  auto compare = [&](const Mat<F>& v) {
    std::vector<typename F::value_type> x(5);
    for (std::size_t i = 0; i < 5; ++i) x[i] = f.mul(v(0, i + 1), f.inv(v(0, 0)));
    const bool vanishes = f.is_zero(out.chart.poly.eval(x));
    out.on_hypersurface += vanishes;
    out.vanishing.record(vanishes == (ctx.corank(Flavor::Y, v) >= 1), datum_to_string(v));
  };
  for (const auto& v : sextic_points(ctx, points / 2, rng)) compare(v);
  while (out.vanishing.checked < points) {
    std::vector<typename F::value_type> x(5);
    for (auto& xi : x) xi = random_element(f, rng);
    compare(chart_datum(Flavor::Y, x, f));
  }
  return out;
}

template <FieldType F>
struct QuarticSummary {
  std::vector<std::size_t> schubert_degrees, general_degrees;
  std::optional<ChartDeterminant<F>> chart;
  std::optional<std::string> chart_error;
};

// Degree of the Z hypersurface along lines of the Plücker embedding, the
// total degree along general chart lines, and the chart interpolation at the
// given bound.
template <FiniteFieldType F>
QuarticSummary<F> quartic_check(const EpwLagrangian<F>& a, Rng& rng, std::size_t lines, unsigned chart_bound) {
  const EpwContext<F> ctx(a);
  QuarticSummary<F> out;
  for (std::size_t i = 0; i < lines; ++i) {
    out.schubert_degrees.push_back(chart_line_degree(ctx, Flavor::Z, true, rng));
    out.general_degrees.push_back(chart_line_degree(ctx, Flavor::Z, false, rng));
  }
  try {
    out.chart = chart_determinant(a, Flavor::Z, rng, chart_bound);
  } catch (const DegreeBoundViolated& e) {
    out.chart_error = e.what();
  }
  return out;
}

// Points of P(V5) for V5 = ker f5: v - (f5(v) / f5_c) e_c.
template <FieldType F>
Mat<F> project_to_hyperplane(const Mat<F>& f5, Mat<F> w) {
  const F& f = f5.field();
  std::size_t c = 0;
  while (c < kSixDim && f.is_zero(f5(0, c))) ++c;
  if (c == kSixDim) throw Degenerate("zero hyperplane functional");
  auto fw = f.zero();
  for (std::size_t i = 0; i < kSixDim; ++i) fw = f.add(fw, f.mul(f5(0, i), w(0, i)));
  w(0, c) = f.sub(w(0, c), f.mul(fw, f.inv(f5(0, c))));
  return w;
}

struct FibrationSummary {
  std::size_t ell = 0;
  std::uint64_t points = 0, sigma_one = 0;
  Tally coranks;     // reduced corank = Y corank
  Tally signatures;  // at Y^1 points, against the EPW fiber signature
};

// Random points of P(V5), then points of Y^1 ∩ P(V5) found along lines.
template <FiniteFieldType F>
FibrationSummary fibration_check(const EpwLagrangian<F>& a, const Mat<F>& f5, Rng& rng, std::size_t points,
                                 std::size_t singular_points) {
  const F& f = a.basis.field();
  const EpwContext<F> ctx(a);
  FibrationSummary out;
  out.ell = hyperplane_intersection(a, f5).cols();
  if (out.ell > 2) throw NotGMRange("dim A ∩ ∧^3 V5 = " + std::to_string(out.ell) + " > 2");
  auto visit = [&](const Mat<F>& v) {
    ++out.points;
    try {
      const auto fp = first_quadratic_fibration_at(a, f5, v);
      const std::size_t k = ctx.corank(Flavor::Y, v);
      out.coranks.record(fp.assessment.corank == k, datum_to_string(v));
      if (k == 1) out.signatures.record(fp.signature == epw_fiber_signature(a, Flavor::Y, v, 1), datum_to_string(v));
    } catch (const SigmaOne&) {
      ++out.sigma_one;
    }
  };
  auto random_v5 = [&] {
    for (;;) {
      const Mat<F> v = project_to_hyperplane(f5, random_mat(f, 1, kSixDim, rng));
      if (rank(v) == 1) return v;
    }
  };
  for (std::size_t i = 0; i < points; ++i) visit(random_v5());
  for (std::size_t tries = 0; out.signatures.checked < singular_points && tries < 100 * singular_points + 100; ++tries) {
    const Mat<F> p = random_v5(), d = random_v5();
    for (std::uint64_t t = 0; t < f.size() && out.signatures.checked < singular_points; ++t) {
      const Mat<F> v = p + scale(d, f.element(t));
      if (rank(v) == 0 || ctx.corank(Flavor::Y, v) == 0) continue;
      visit(v);
    }
  }
  return out;
}

}  // namespace atlas
