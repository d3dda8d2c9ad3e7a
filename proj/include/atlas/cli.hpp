#pragma once

// Command line front end. run() parses arguments, dispatches on the field,
// and writes one JSON report per invocation.
//
// Exit codes: 0 all checks passed, 1 a mathematical finding (the report holds
// the witness), 2 usage, input or budget error.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/time.h>
#include <unistd.h>

#include <csignal>

#include <CLI11.hpp>
#include <json.hpp>

#include "atlas/checks.hpp"

namespace atlas::cli {

inline constexpr const char* kVersion = "1.0.0";

using json = nlohmann::ordered_json;

struct Options {
  std::string subcommand;
  std::optional<std::uint64_t> p;
  unsigned ext_degree = 1;
  bool rationals = false;
  std::uint64_t seed = 1;
  std::uint64_t budget_points = 10'000'000;
  std::uint64_t budget_groebner = 200'000;
  std::optional<double> budget_seconds;
  std::string in, out;
  bool json_output = false;
  bool timing = true;

  std::string flavor = "y";
  std::string point;
  std::string chart;
  std::optional<std::size_t> k;
  std::size_t size = 4;
  std::size_t d = 3;
  std::size_t mats = 4;
  std::size_t n = 3;
  std::size_t nvars = 2;
  std::size_t points = 1000;
  std::size_t singular = 50;
  std::size_t samples = 10000;
  std::size_t lines = 8;
  std::string family = "random";
};

struct Outcome {
  json result = json::object();
  bool finding = false;
  std::vector<DiscardedSeed> discarded;
};

// ---------------------------------------------------------------------------
// Input

struct FieldHeader {
  bool rational = false;
  std::uint64_t p = 0;
};

struct LagrangianText {
  FieldHeader header;
  std::vector<std::vector<std::string>> rows;
};

inline LagrangianText read_lagrangian_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  LagrangianText t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok.size() == 1 && tok[0] == "Q") {
        t.header.rational = true;
      } else if (tok.size() == 2 && tok[0] == "p") {
        try {
          t.header.p = std::stoull(tok[1]);
        } catch (const std::logic_error&) {
          throw ParseError("bad prime '" + tok[1] + "'");
        }
      } else {
        throw ParseError("first line must be 'p <prime>' or 'Q'");
      }
      have_header = true;
      continue;
    }
    if (tok.size() != 10) throw ParseError("row " + std::to_string(t.rows.size() + 1) + " has " +
                                           std::to_string(tok.size()) + " entries, expected 10");
    t.rows.push_back(std::move(tok));
  }
  if (!have_header) throw ParseError("empty input " + path);
  if (t.rows.size() != 20) throw ParseError("expected 20 rows, found " + std::to_string(t.rows.size()));
  return t;
}

template <FieldType F>
EpwLagrangian<F> parse_lagrangian(const F& f, const LagrangianText& t) {
  Mat<F> m(f, 20, 10);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 10; ++j) m(i, j) = parse_element(f, t.rows[i][j]);
  return explicit_lagrangian(std::move(m));
}

// Rows separated by ';', entries by ','.
template <FieldType F>
Mat<F> parse_datum(const F& f, const std::string& s, std::size_t rows) {
  std::vector<std::vector<typename F::value_type>> out;
  std::stringstream rs(s);
  for (std::string row; std::getline(rs, row, ';');) {
    std::vector<typename F::value_type> r;
    std::stringstream es(row);
    for (std::string e; std::getline(es, e, ',');) {
      const auto b = e.find_first_not_of(" ()"), en = e.find_last_not_of(" ()");
      if (b == std::string::npos) throw ParseError("empty entry in point '" + s + "'");
      r.push_back(parse_element(f, e.substr(b, en - b + 1)));
    }
    if (r.size() != kSixDim) throw ParseError("point rows need 6 entries: '" + s + "'");
    out.push_back(std::move(r));
  }
  if (out.size() != rows) throw ParseError("datum needs " + std::to_string(rows) + " rows: '" + s + "'");
  Mat<F> m(f, rows, kSixDim);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < kSixDim; ++j) m(i, j) = out[i][j];
  return m;
}

inline std::vector<std::size_t> parse_index_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  for (std::string e; std::getline(ss, e, ',');) {
    try {
      out.push_back(std::stoul(e));
    } catch (const std::logic_error&) {
      throw ParseError("bad chart index '" + e + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON pieces

inline json tally_json(const Tally& t) {
  json j;
  j["checked"] = t.checked;
  j["disagreements"] = t.disagreements;
  j["first_disagreement"] = t.first_disagreement ? json(*t.first_disagreement) : json(nullptr);
  return j;
}

inline json discarded_json(const std::vector<DiscardedSeed>& d) {
  json a = json::array();
  for (const auto& s : d) a.push_back({{"seed", s.seed}, {"reason", s.reason}});
  return a;
}

template <FieldType F>
json screen_json(const std::optional<ScreenReport<F>>& s, const std::optional<GeometricScreen>& g) {
  if (s) return {{"method", "rational points"}, {"points", s->points}, {"decomposable", s->flagged}};
  if (g) {
    json j{{"method", "Groebner over the algebraic closure"}, {"empty", g->empty}, {"reductions", g->reductions}};
    if (g->chart) j["chart"] = *g->chart;
    return j;
  }
  return {{"method", "none"}};
}

template <FieldType F>
json census_json(const CensusReport<F>& c) {
  json j;
  j["space"] = space_name(c.flavor);
  j["q"] = c.q;
  j["histogram"] = c.histogram;
  j["total"] = c.total;
  j["expected_total"] = census_space_size(c.flavor, c.q);
  j["max_corank"] = c.max_corank;
  j["forbidden_from"] = forbidden_corank(c.flavor);
  j["forbidden_count"] = c.at_least(forbidden_corank(c.flavor));
  json w = json::array();
  for (std::size_t k = 1; k < c.witnesses.size(); ++k)
    if (c.witnesses[k])
      w.push_back({{"corank", k}, {"index", c.witnesses[k]->first}, {"datum", datum_to_string(c.witnesses[k]->second)}});
  j["witnesses"] = w;
  return j;
}

// ---------------------------------------------------------------------------
// Subcommands

template <FieldType F>
Outcome unsupported(const F& f, const std::string& what) {
  throw Unsupported(what + " needs a finite field, got " + f.name());
}

template <FieldType F>
EpwLagrangian<F> input_lagrangian(const F& f, const Options& o, const std::optional<LagrangianText>& text) {
  if (text) return parse_lagrangian(f, *text);
  return random_graph_lagrangian(f, o.seed);
}

// Seeded Lagrangians go through the screen and its resample chain.
template <FiniteFieldType F>
EpwLagrangian<F> screened_input(const F& f, const Options& o, const std::optional<LagrangianText>& text, Outcome& out) {
  if (text) return parse_lagrangian(f, *text);
  auto s = screened_seed(f, o.seed, o.budget_points);
  out.result["screen"] = screen_json(s.screen, s.geometric);
  out.discarded = std::move(s.discarded);
  if (!s.passed) throw Degenerate("no seed in the resample chain passed the decomposable screen");
  return random_graph_lagrangian(f, s.seed);
}

template <FieldType F>
Outcome run_census(const F& f, const Options& o, const std::optional<LagrangianText>& text) {
  if constexpr (!FiniteFieldType<F>) {
    return unsupported(f, "census");
  } else {
    const Flavor fl = parse_flavor(o.flavor);
    Outcome out;
    CensusReport<F> c;
    if (text) {
      const auto a = parse_lagrangian(f, *text);
      std::optional<ScreenReport<F>> screen;
      std::optional<GeometricScreen> geometric;
      screen_seed(a, o.budget_points, screen, geometric);
      c = census(a, fl, o.budget_points);
      out.result["lagrangian"] = a.provenance;
      out.result["screen"] = screen_json(screen, geometric);
    } else {
      auto sc = screened_census(f, fl, o.seed, o.budget_points);
      c = std::move(sc.census);
      out.discarded = std::move(sc.discarded);
      out.result["lagrangian"] = "graph(seed=" + std::to_string(sc.seed) + ")";
      out.result["screen"] = screen_json(sc.screen, sc.geometric);
    }
    out.result["flavor"] = to_string(fl);
    out.result["census"] = census_json(c);
    out.finding = c.at_least(forbidden_corank(fl)) > 0 || c.total != census_space_size(fl, c.q);
    return out;
  }
}

template <FieldType F>
Outcome run_cover_fiber(const F& f, const Options& o, const std::optional<LagrangianText>& text) {
  const Flavor fl = parse_flavor(o.flavor);
  if (o.point.empty()) throw ParseError("cover-fiber needs --point");
  const auto a = input_lagrangian(f, o, text);
  const Mat<F> datum = parse_datum(f, o.point, datum_rows(fl));
  std::optional<std::vector<std::size_t>> chart;
  if (!o.chart.empty()) chart = parse_index_list(o.chart);
  const auto ff = fiber_space(fl, datum, chart);
  const std::size_t corank = epw_corank_at(a, fl, datum);
  const std::size_t k = o.k.value_or(corank);
  Outcome out;
  out.result["lagrangian"] = a.provenance;
  out.result["flavor"] = to_string(fl);
  out.result["datum"] = datum_to_string(datum);
  out.result["chart"] = ff.chart;
  out.result["corank"] = corank;
  out.result["k"] = k;
  out.result["signature"] = to_string(epw_fiber_signature(a, fl, datum, k, chart));
  return out;
}

template <FieldType F>
Outcome run_veronese(const F& f, const Options& o) {
  if constexpr (!FiniteFieldType<F>) {
    return unsupported(f, "veronese-check");
  } else {
    const auto s = veronese_check(f, o.k.value_or(2), o.budget_points);
    Outcome out;
    out.result["k"] = o.k.value_or(2);
    out.result["size"] = s.size;
    out.result["rank_one_forms"] = s.forms;
    out.result["split"] = s.split;
    out.result["inert"] = s.inert;
    out.result["ramified"] = s.ramified;
    out.result["agreement"] = tally_json(s.tally);
    out.finding = !s.tally.ok();
    return out;
  }
}

template <FieldType F>
Outcome run_stein(const F& f, const Options& o) {
  if constexpr (!FiniteFieldType<F>) {
    return unsupported(f, "stein-check");
  } else {
    Rng rng(o.seed);
    const auto s = stein_check(f, o.size, o.budget_points, rng, o.samples);
    Outcome out;
    out.result["size"] = s.size;
    out.result["mode"] = s.exhaustive ? "exhaustive" : "sampled";
    out.result["forms"] = s.forms;
    out.result["nondegenerate"] = s.nondegenerate;
    out.result["split"] = s.split;
    out.result["inert"] = s.inert;
    out.result["agreement"] = tally_json(s.tally);
    out.finding = !s.tally.ok();
    return out;
  }
}

template <FieldType F>
Outcome run_stratify(const F& f, const Options& o) {
  if constexpr (!FiniteFieldType<F>) {
    return unsupported(f, "stratify");
  } else {
    Rng rng(o.seed);
    std::optional<QuadraticFamily<F>> qf;
    if (o.family == "universal") {
      qf.emplace(universal_family(f, o.size));
    } else if (o.family == "random") {
      qf.emplace(random_linear_symmetric(f, o.size, o.nvars, rng), "random linear forms");
    } else {
      throw ParseError("unknown family '" + o.family + "' (random, universal)");
    }
    const auto s = stratify(*qf, o.budget_points);
    Outcome out;
    out.result["family"] = o.family;
    out.result["m"] = s.m;
    out.result["nvars"] = s.nvars;
    out.result["points"] = s.points;
    json rows = json::array();
    for (const auto& r : s.strata)
      if (r.points > 0)
        rows.push_back({{"corank", r.corank}, {"points", r.points}, {"split", r.split}, {"inert", r.inert},
                        {"expected_smooth", r.smooth}});
    out.result["strata"] = rows;
    out.result["branch"] = tally_json(s.branch);
    out.finding = !s.branch.ok();
    return out;
  }
}

template <FieldType F>
Outcome run_symmetroid(const F& f, const Options& o) {
  if constexpr (!FiniteFieldType<F>) {
    return unsupported(f, "symmetroid");
  } else {
    if (o.d == 0) throw ShapeError("--d must be positive");
    Rng rng(o.seed);
    std::vector<Mat<F>> mats;
    for (std::size_t i = 0; i < o.mats; ++i) mats.push_back(random_symmetric(f, 2 * o.d - 1, rng));
    const auto s = symmetroid_check(mats, rng, o.budget_points, 100);
    Outcome out;
    out.result["size"] = s.size;
    out.result["nvars"] = s.nvars;
    out.result["degree"] = s.degree;
    out.result["expected_degree"] = s.expected_degree;
    out.result["verified_points"] = s.verified_points;
    out.result["exhaustive"] = s.exhaustive;
    if (s.exhaustive) out.result["histogram"] = s.histogram;
    out.result["smooth_corank_one"] = tally_json(s.smooth);
    out.result["branch"] = tally_json(s.branch);
    out.finding = s.degree != s.expected_degree || !s.smooth.ok() || !s.branch.ok();
    return out;
  }
}

template <FieldType F>
Outcome run_reduce(const F& f, const Options& o) {
  if constexpr (!FiniteFieldType<F>) {
    return unsupported(f, "reduce");
  } else {
    Rng rng(o.seed);
    const auto pair = random_linear_pair(f, o.n, o.nvars, rng);
    const auto s = reduction_check(pair, rng, o.points);
    Outcome out;
    out.result["n"] = s.n;
    out.result["nvars"] = s.nvars;
    out.result["points"] = s.points;
    out.result["skipped"] = s.skipped;
    out.result["corank_histogram"] = s.coranks;
    out.result["coranks"] = tally_json(s.coranks_kept);
    out.result["signatures"] = tally_json(s.signatures_kept);
    out.finding = !s.coranks_kept.ok() || !s.signatures_kept.ok();
    return out;
  }
}

template <FieldType F>
Outcome run_lag2quad(const F& f, const Options& o) {
  if constexpr (!FiniteFieldType<F>) {
    return unsupported(f, "lag2quad");
  } else {
    Rng rng(o.seed);
    const auto pair = random_linear_pair(f, o.n, o.nvars, rng);
    std::vector<typename F::value_type> base(o.nvars);
    for (auto& x : base) x = random_element(f, rng);
    const Mat<F> a3 = random_transverse_lagrangian(pair, base, rng);
    const auto s = conversion_check(pair, a3, rng, o.points);
    Outcome out;
    out.result["n"] = s.n;
    out.result["nvars"] = s.nvars;
    out.result["symmetric"] = s.symmetric;
    out.result["points"] = s.points;
    out.result["not_transverse"] = s.not_transverse;
    out.result["coranks"] = tally_json(s.coranks);
    out.result["signatures"] = tally_json(s.signatures);
    out.finding = !s.symmetric || !s.coranks.ok() || !s.signatures.ok();
    return out;
  }
}

template <FieldType F>
Outcome run_epw_degree(const F& f, const Options& o, const std::optional<LagrangianText>& text) {
  if constexpr (!FiniteFieldType<F>) {
    return unsupported(f, "epw-degree");
  } else {
    const Flavor fl = parse_flavor(o.flavor);
    Outcome out;
    const auto a = screened_input(f, o, text, out);
    Rng rng(o.seed);
    Rng work = rng.fork(1);
    out.result["lagrangian"] = a.provenance;
    out.result["flavor"] = to_string(fl);
    out.result["claimed_degree"] = claimed_degree(fl);
    if (fl == Flavor::Y) {
      try {
        const auto s = sextic_check(a, work, o.points);
        out.result["degree"] = s.chart.degree;
        out.result["measure"] = "total degree on the chart v0 = 1";
        out.result["bound"] = claimed_degree(fl);
        out.result["grid_points"] = s.chart.grid_points;
        out.result["verified_points"] = s.chart.verified_points;
        out.result["terms"] = s.chart.poly.size();
        out.result["points_on_hypersurface"] = s.on_hypersurface;
        out.result["vanishing_iff_corank"] = tally_json(s.vanishing);
        Rng slice_rng = rng.fork(3);
        const auto surface = y_stratum_degree(a, 2, slice_rng, o.budget_groebner);
        json st{{"corank", 2}, {"claimed_degree", 40}, {"slice_dimension", surface.slice_dimension},
                {"generators", surface.generators}};
        if (surface.groebner) {
          st["status"] = "done";
          st["degree"] = surface.groebner->degree;
          st["reductions"] = surface.groebner->reductions;
        } else {
          st["status"] = "skipped";
          st["reason"] = "Groebner budget exhausted";
        }
        out.result["stratum"] = st;
        out.finding = s.chart.degree != claimed_degree(fl) || !s.vanishing.ok() ||
                      (surface.groebner && surface.groebner->degree != 40);
      } catch (const DegreeBoundViolated& e) {
        out.result["degree"] = nullptr;
        out.result["bound"] = claimed_degree(fl);
        out.result["error"] = e.what();
        out.finding = true;
      }
    } else if (fl == Flavor::Z) {
      const auto s = quartic_check(a, work, o.lines, claimed_degree(fl));
      const bool consistent = std::all_of(s.schubert_degrees.begin(), s.schubert_degrees.end(),
                                          [&](std::size_t d) { return d == s.schubert_degrees.front(); });
      out.result["degree"] = consistent && !s.schubert_degrees.empty() ? json(s.schubert_degrees.front()) : json(nullptr);
      out.result["measure"] = "degree along lines of the Pluecker embedding";
      out.result["line_degrees"] = s.schubert_degrees;
      out.result["chart_total_degrees"] = s.general_degrees;
      json chart;
      chart["bound"] = claimed_degree(fl);
      if (s.chart) {
        chart["outcome"] = "ok";
        chart["degree"] = s.chart->degree;
      } else {
        chart["outcome"] = "DegreeBoundViolated";
        chart["message"] = *s.chart_error;
      }
      out.result["chart_interpolation"] = chart;
      out.finding = !consistent || s.schubert_degrees.empty() || s.schubert_degrees.front() != claimed_degree(fl);
    } else {
      throw Unsupported("epw-degree is defined for flavors y and z");
    }
    return out;
  }
}

template <FieldType F>
Outcome run_q1(const F& f, const Options& o, const std::optional<LagrangianText>& text) {
  if constexpr (!FiniteFieldType<F>) {
    return unsupported(f, "q1-check");
  } else {
    Outcome out;
    const auto a = screened_input(f, o, text, out);
    Rng rng(o.seed);
    Rng work = rng.fork(2);
    Mat<F> f5(f, 1, kSixDim);
    if (!o.point.empty()) {
      f5 = parse_datum(f, o.point, 1);
    } else {
      do f5 = random_mat(f, 1, kSixDim, work);
      while (rank(f5) == 0);
    }
    const auto s = fibration_check(a, f5, work, o.points, o.singular);
    out.result["lagrangian"] = a.provenance;
    out.result["hyperplane"] = datum_to_string(f5);
    out.result["ell"] = s.ell;
    out.result["points"] = s.points;
    out.result["sigma_one"] = s.sigma_one;
    out.result["coranks"] = tally_json(s.coranks);
    out.result["signatures_at_corank_one"] = tally_json(s.signatures);
    out.finding = !s.coranks.ok() || !s.signatures.ok();
    return out;
  }
}

template <FieldType F>
Outcome dispatch(const F& f, const Options& o, const std::optional<LagrangianText>& text) {
  const std::string& c = o.subcommand;
  if (c == "census") return run_census(f, o, text);
  if (c == "cover-fiber") return run_cover_fiber(f, o, text);
  if (c == "veronese-check") return run_veronese(f, o);
  if (c == "stein-check") return run_stein(f, o);
  if (c == "stratify") return run_stratify(f, o);
  if (c == "symmetroid") return run_symmetroid(f, o);
  if (c == "reduce") return run_reduce(f, o);
  if (c == "lag2quad") return run_lag2quad(f, o);
  if (c == "epw-degree") return run_epw_degree(f, o, text);
  if (c == "q1-check") return run_q1(f, o, text);
  throw Unsupported("unknown subcommand " + c);
}

// ---------------------------------------------------------------------------
// Driver

inline bool uses_lagrangian_input(const std::string& c) {
  return c == "census" || c == "cover-fiber" || c == "epw-degree" || c == "q1-check";
}

inline json base_report(const Options& o, const std::string& field) {
  json r;
  r["tool"] = "degeneracy-atlas";
  r["version"] = kVersion;
  r["subcommand"] = o.subcommand;
  r["field"] = field;
  r["seed"] = o.seed;
  r["budgets"] = {{"points", o.budget_points},
                  {"groebner", o.budget_groebner},
                  {"seconds", o.budget_seconds ? json(*o.budget_seconds) : json(nullptr)}};
  if (!o.in.empty()) r["input"] = o.in;
  return r;
}

inline void emit(const json& report, const Options& o, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw ParseError("cannot write " + o.out);
    f << text;
  }
  if (o.json_output) {
    out << text;
    return;
  }
  if (report.contains("error")) return;
  out << report["subcommand"].get<std::string>() << " over " << report["field"].get<std::string>() << ": "
      << report["status"].get<std::string>() << "\n";
  if (report.contains("result"))
    for (const auto& [key, value] : report["result"].items()) {
      const std::string v = value.dump();
      if (v.size() <= 100) out << "  " << key << ": " << v << "\n";
    }
}

inline void add_subcommands(CLI::App& app, Options& o) {
  auto flavor = [&](CLI::App* s) { s->add_option("--flavor", o.flavor, "y, ydual or z"); };
  auto* stratify = app.add_subcommand("stratify", "Corank strata and signatures of a quadratic family on a chart");
  stratify->add_option("--family", o.family, "random or universal");
  stratify->add_option("--size", o.size, "matrix size");
  stratify->add_option("--nvars", o.nvars, "chart dimension");

  auto* census = app.add_subcommand("census", "Corank census of an EPW Lagrangian");
  flavor(census);

  auto* cover = app.add_subcommand("cover-fiber", "Fiber signature of an EPW double cover at a point");
  flavor(cover);
  cover->add_option("--point", o.point, "datum, rows separated by ';'");
  cover->add_option("--k", o.k, "queried corank (default: the corank at the point)");
  cover->add_option("--chart", o.chart, "chart pivot columns, comma separated");

  auto* veronese = app.add_subcommand("veronese-check", "Square roots of rank-one forms against the cover signature");
  veronese->add_option("--k", o.k, "queried corank; forms have size k + 1");

  auto* stein = app.add_subcommand("stein-check", "Ruling rationality against the signed discriminant");
  stein->add_option("--size", o.size, "even form size");
  stein->add_option("--samples", o.samples, "random forms when the enumeration exceeds the budget");

  auto* sym = app.add_subcommand("symmetroid", "Determinant degree, smoothness and branching of a symmetroid");
  sym->add_option("--d", o.d, "matrices have size 2d - 1");
  sym->add_option("--mats", o.mats, "number of matrices");

  auto* reduce = app.add_subcommand("reduce", "Isotropic reduction on a random Lagrangian pair");
  reduce->add_option("--n", o.n, "half dimension");
  reduce->add_option("--nvars", o.nvars, "chart dimension");
  reduce->add_option("--points", o.points, "sample points");

  auto* l2q = app.add_subcommand("lag2quad", "Lagrangian-to-quadratic conversion on a random pair");
  l2q->add_option("--n", o.n, "half dimension");
  l2q->add_option("--nvars", o.nvars, "chart dimension");
  l2q->add_option("--points", o.points, "sample points");

  auto* degree = app.add_subcommand("epw-degree", "Degree of the EPW sextic (y) or the quartic in Gr(3,6) (z)");
  flavor(degree);
  degree->add_option("--points", o.points, "points for the vanishing cross-check (y)");
  degree->add_option("--lines", o.lines, "lines for the degree measurement (z)");

  auto* q1 = app.add_subcommand("q1-check", "First quadratic fibration against the Y corank");
  q1->add_option("--hyperplane", o.point, "functional defining V5 (default: random)");
  q1->add_option("--points", o.points, "random points of P(V5)");
  q1->add_option("--singular-points", o.singular, "points of Y^1 in P(V5)");
}

namespace detail {

// Written from the SIGALRM handler when the wall time budget runs out.
struct TimeoutText {
  std::string text;
  int fd = 2;
};

inline TimeoutText& timeout_text() {
  static TimeoutText t;
  return t;
}

extern "C" inline void on_timeout(int) {
  const auto& t = timeout_text();
  std::size_t done = 0;
  while (done < t.text.size()) {
    const auto n = ::write(t.fd, t.text.data() + done, t.text.size() - done);
    if (n <= 0) break;
    done += static_cast<std::size_t>(n);
  }
  std::_Exit(2);
}

inline void arm_timer(double seconds) {
  itimerval v{};
  v.it_value.tv_sec = static_cast<time_t>(seconds);
  v.it_value.tv_usec = static_cast<suseconds_t>((seconds - static_cast<double>(v.it_value.tv_sec)) * 1e6);
  if (v.it_value.tv_sec == 0 && v.it_value.tv_usec == 0) v.it_value.tv_usec = 1;
  std::signal(SIGALRM, on_timeout);
  setitimer(ITIMER_REAL, &v, nullptr);
}

inline void disarm_timer() {
  itimerval v{};
  setitimer(ITIMER_REAL, &v, nullptr);
  std::signal(SIGALRM, SIG_DFL);
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Degeneracy loci of quadratic and Lagrangian families over finite fields", "degeneracy-atlas"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.add_option("--p", o.p, "prime field characteristic");
  app.add_option("--ext-degree", o.ext_degree, "work over GF(p^r)")->check(CLI::Range(1u, 16u));
  app.add_flag("--rationals", o.rationals, "work over the rationals");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--budget-points", o.budget_points, "maximum enumerated points")->check(CLI::PositiveNumber);
  app.add_option("--budget-groebner", o.budget_groebner, "maximum Groebner reductions")->check(CLI::PositiveNumber);
  app.add_option("--budget-seconds", o.budget_seconds, "wall time limit")->check(CLI::PositiveNumber);
  app.add_option("--in", o.in, "explicit Lagrangian: 'p <prime>' or 'Q', then 20 rows of 10 entries");
  app.add_option("--out", o.out, "write the JSON report here");
  app.add_flag("--json", o.json_output, "print the JSON report");
  bool no_timing = false;
  app.add_flag("--no-timing", no_timing, "report wall time as null");
  add_subcommands(app, o);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "degeneracy-atlas: " << e.what() << "\n";
    return 2;
  }
  o.subcommand = app.get_subcommands().front()->get_name();
  o.timing = !no_timing;

  const auto start = std::chrono::steady_clock::now();
  auto arm = [&](const std::string& field) {
    if (!o.budget_seconds) return;
    const std::string message = "wall time budget of " + json(*o.budget_seconds).dump() + " s exhausted";
    json report = base_report(o, field);
    report["status"] = "error";
    report["discarded_seeds"] = json::array();
    report["error"] = {{"kind", "BudgetExceeded"}, {"message", "BudgetExceeded: " + message}};
    report["exit_code"] = 2;
    report["wall_time_s"] = o.timing ? json(*o.budget_seconds) : json(nullptr);
    auto& t = detail::timeout_text();
    t.fd = o.json_output ? 1 : 2;
    t.text = o.json_output ? report.dump(2) + "\n" : "degeneracy-atlas: BudgetExceeded: " + message + "\n";
    out.flush();
    detail::arm_timer(*o.budget_seconds);
  };
  auto finish = [&](json& report, int code) {
    if (o.budget_seconds) detail::disarm_timer();
    report["exit_code"] = code;
    if (o.timing) {
      report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } else {
      report["wall_time_s"] = nullptr;
    }
    try {
      emit(report, o, out);
    } catch (const Error& e) {
      err << "degeneracy-atlas: " << e.what() << "\n";
      return 2;
    }
    return code;
  };

  std::string field_name = "unresolved";
  try {
    std::optional<LagrangianText> text;
    if (!o.in.empty()) {
      if (!uses_lagrangian_input(o.subcommand)) throw ParseError(o.subcommand + " takes no --in file");
      text = read_lagrangian_text(o.in);
      if (text->header.rational) {
        if (o.p) throw FieldMismatch("input is over Q but --p was given");
        o.rationals = true;
      } else {
        if (o.rationals) throw FieldMismatch("input is over GF(" + std::to_string(text->header.p) + ")");
        if (o.p && *o.p != text->header.p) throw FieldMismatch("input prime differs from --p");
        o.p = text->header.p;
      }
    }
    if (o.rationals && (o.p || o.ext_degree != 1)) throw FieldMismatch("--rationals excludes --p and --ext-degree");
    if (!o.rationals && !o.p) throw ParseError("a field is required: --p <prime> or --rationals");

    Outcome res;
    if (o.rationals) {
      const RationalField f;
      field_name = f.name();
      arm(field_name);
      res = dispatch(f, o, text);
    } else if (o.ext_degree > 1) {
      const ExtField f(*o.p, o.ext_degree);
      field_name = f.name();
      arm(field_name);
      res = dispatch(f, o, text);
    } else {
      const PrimeField f(*o.p);
      field_name = f.name();
      arm(field_name);
      res = dispatch(f, o, text);
    }
    json report = base_report(o, field_name);
    report["status"] = res.finding ? "finding" : "ok";
    report["discarded_seeds"] = discarded_json(res.discarded);
    report["result"] = std::move(res.result);
    return finish(report, res.finding ? 1 : 0);
  } catch (const Error& e) {
    json report = base_report(o, field_name);
    report["status"] = "error";
    report["discarded_seeds"] = json::array();
    report["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    err << "degeneracy-atlas: " << e.what() << "\n";
    return finish(report, 2);
  } catch (const std::exception& e) {
    json report = base_report(o, field_name);
    report["status"] = "error";
    report["discarded_seeds"] = json::array();
    report["error"] = {{"kind", "Internal"}, {"message", e.what()}};
    err << "degeneracy-atlas: " << e.what() << "\n";
    return finish(report, 2);
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace atlas::cli
