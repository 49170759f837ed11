#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "qclt/harness/cache.hpp"
#include "qclt/harness/config.hpp"
#include "qclt/harness/record.hpp"

namespace qclt::harness {

/// CSV header per table; part of the output contract.
inline std::vector<std::string> csv_header(const std::string& table) {
  static const std::map<std::string, std::vector<std::string>> headers{
      {"theorem1_summary",
       {"q", "family", "method", "normalization", "sample_size", "flagged", "unsupported", "raw_mean",
        "raw_variance", "paper_variance", "variance_ratio", "ks_distance"}},
      {"theorem1_tails", {"q", "V", "empirical_tail", "gaussian_tail"}},
      {"prop1", {"q", "sigma", "statistic", "ratio", "sample_size", "flagged"}},
      {"prop2_moments",
       {"q", "kind", "k", "l", "empirical_re", "empirical_im", "predicted", "std_error", "sample_size"}},
      {"prop2_summary",
       {"q", "X", "sigma0", "V_X", "loglog_q", "ks_distance_vx", "ks_distance_empirical", "mean_abs_P_minus_P0",
        "sample_size"}},
      {"prop3",
       {"q", "X", "Y", "K1", "K2", "support_cap", "sample_size", "median", "p90", "p99", "coeff_statistic",
        "coeff_property1", "coeff_property3", "coeff_incomplete", "support_truncated"}},
      {"prop4",
       {"q", "method", "sample_size", "excluded", "mean_sq", "median_abs", "frac_below_one", "stub"}},
      {"prop4_smoothed",
       {"q", "method", "T", "c", "nodes", "sample_size", "flagged", "ratio", "ratio_half_T", "relative_change",
        "stub"}},
      {"lemma1",
       {"q", "k", "l", "empirical_re", "empirical_im", "empirical_abs", "predicted", "std_error", "sample_size"}},
  };
  return headers.at(table);
}

inline std::vector<std::string> experiment_tables(Experiment e) {
  switch (e) {
    case Experiment::theorem1:
      return {"theorem1_summary", "theorem1_tails"};
    case Experiment::prop1:
      return {"prop1"};
    case Experiment::prop2:
      return {"prop2_moments", "prop2_summary"};
    case Experiment::prop3:
      return {"prop3"};
    case Experiment::prop4:
      return {"prop4"};
    case Experiment::prop4_smoothed:
      return {"prop4_smoothed"};
    case Experiment::lemma1:
      return {"lemma1"};
  }
  return {};
}

/// A record with the config snapshot and header-only tables.
inline RunRecord make_record(const ExperimentConfig& config) {
  RunRecord rec;
  rec.experiment = to_string(config.experiment);
  rec.config = to_json(config);
  for (const auto& name : experiment_tables(config.experiment)) rec.tables.push_back({name, csv_header(name), {}});
  return rec;
}

/// Family members for the run, subsampled to maxChars with the seeded RNG.
inline std::vector<std::size_t> select_members(const CharacterGroup& group, const ExperimentConfig& config) {
  std::vector<std::size_t> members = family_indices(group, config.family);
  if (config.maxChars && members.size() > *config.maxChars) {
    std::vector<std::size_t> picked;
    std::mt19937_64 rng(config.seed);
    std::sample(members.begin(), members.end(), std::back_inserter(picked), *config.maxChars, rng);
    members = std::move(picked);
  }
  return members;
}

struct RunContext {
  const ExperimentConfig& config;
  LValueCache& cache;
  const SieveTables& tables;
};

inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

namespace detail {

inline ojson cplx_pair(cplx z) { return ojson::array({z.real(), z.imag()}); }

inline void require_members(const std::vector<std::size_t>& members, const ExperimentConfig& config) {
  if (members.empty()) {
    throw std::invalid_argument(std::string("empty ") + to_string(config.family) + " family");
  }
}

/// Sieve large enough for every q in the run.
inline std::uint64_t sieve_limit(const ExperimentConfig& config) {
  std::uint64_t limit = 1000;
  for (std::uint64_t q : config.qList) {
    const DeskParams p = config.desk_params(q);
    limit = std::max({limit, p.X, p.supportCap});
  }
  return limit;
}

inline void edf_plots(RunRecord& rec, const std::string& prefix, std::uint64_t q, const EdfReport& edf,
                      const std::string& what) {
  const std::string tag = prefix + "_q" + std::to_string(q);
  rec.plots.push_back({tag + "_hist", PlotKind::histogram, what + ", q = " + std::to_string(q) + " (" +
                                                               to_string(edf.normalization) + ")",
                       "normalized value", "density", edf.samples, {}});
  rec.plots.push_back({tag + "_qq", PlotKind::qq, "Q-Q against N(0,1), q = " + std::to_string(q),
                       "standard normal quantile", "sample quantile", edf.samples, {}});
}

inline ojson edf_json(const EdfReport& edf) {
  ojson j;
  j["normalization"] = to_string(edf.normalization);
  j["sample_size"] = edf.samples.size();
  j["flagged"] = edf.flaggedCount;
  j["mean"] = edf.mean;
  j["variance"] = edf.variance;
  j["raw_mean"] = edf.rawMean;
  j["raw_variance"] = edf.rawVariance;
  j["scale"] = edf.scale;
  j["ks_distance"] = edf.ksDistance;
  ojson tails = ojson::array();
  for (const auto& t : edf.tails) tails.push_back({{"V", t.V}, {"empirical", t.empirical}, {"gaussian", t.gaussian}});
  j["tails"] = std::move(tails);
  return j;
}

}  // namespace detail

inline void theorem1_q(RunContext& ctx, RunRecord& rec, QResult& res) {
  const auto& cfg = ctx.config;
  const std::uint64_t q = res.q;
  const DeskParams params = cfg.desk_params(q);
  const auto group = build_group(q);
  const GroupInfo info = group_info(*group);
  const auto members = select_members(*group, cfg);
  detail::require_members(members, cfg);
  const LMethod method = cfg.effective_method();
  const auto L = ctx.cache.get(*group, info, {0.5, params.t}, method);

  std::vector<double> logs;
  std::uint64_t flagged = 0;
  std::uint64_t unsupported = 0;
  std::vector<std::uint64_t> flaggedList;
  for (std::size_t i : members) {
    ojson row;
    row["chi_index"] = i;
    if (!L->available[i]) {
      ++unsupported;
      row["available"] = false;
      res.rows.push_back(std::move(row));
      continue;
    }
    row["available"] = true;
    row["L"] = detail::cplx_pair(L->values[i]);
    const auto v = log_abs_L(L->values[i], cfg.floor);
    row["flagged"] = !v;
    row["log_abs_L"] = v ? ojson(*v) : ojson(nullptr);
    if (v) {
      logs.push_back(*v);
    } else {
      ++flagged;
      flaggedList.push_back(i);
    }
    res.rows.push_back(std::move(row));
  }
  if (logs.size() < 2) {
    throw std::invalid_argument("fewer than 2 usable characters (" + std::to_string(logs.size()) + ")");
  }
  const EdfReport edf = edf_report(logs, cfg.normalization, params, flagged);
  const double paperVar = 0.5 * std::log(std::log(static_cast<double>(q)));
  res.summary = detail::edf_json(edf);
  res.summary["family_size"] = members.size();
  res.summary["unsupported"] = unsupported;
  res.summary["flagged_chi"] = flaggedList;
  res.summary["paper_variance"] = paperVar;
  res.summary["variance_ratio"] = edf.rawVariance / paperVar;
  res.summary["err_estimate"] = L->errEstimate;

  rec.table("theorem1_summary")
      .rows.push_back({q, to_string(cfg.family), to_string(method), to_string(cfg.normalization), logs.size(),
                       flagged, unsupported, edf.rawMean, edf.rawVariance, paperVar, edf.rawVariance / paperVar,
                       edf.ksDistance});
  for (const auto& t : edf.tails) rec.table("theorem1_tails").rows.push_back({q, t.V, t.empirical, t.gaussian});
  detail::edf_plots(rec, "theorem1", q, edf, "log|L(1/2+it)|");
}

inline std::vector<double> prop1_grid(const ExperimentConfig& cfg, std::uint64_t q) {
  if (!cfg.sigmaGrid.empty()) return cfg.sigmaGrid;
  std::vector<double> grid;
  const double span = 10.0 / std::log(static_cast<double>(q));
  for (int j = 1; j <= 8; ++j) grid.push_back(0.5 + span * j / 8.0);
  return grid;
}

inline void prop1_q(RunContext& ctx, RunRecord& rec, QResult& res) {
  const auto& cfg = ctx.config;
  const std::uint64_t q = res.q;
  const DeskParams params = cfg.desk_params(q);
  const auto group = build_group(q);
  const GroupInfo info = group_info(*group);
  const auto members = select_members(*group, cfg);
  detail::require_members(members, cfg);
  const LMethod method = cfg.effective_method();
  const auto half = ctx.cache.get(*group, info, {0.5, params.t}, method);
  ojson points = ojson::array();
  double lo = INFINITY;
  double hi = 0.0;
  for (double sigma : prop1_grid(cfg, q)) {
    const auto right = ctx.cache.get(*group, info, {sigma, params.t}, method);
    const Prop1Result r = prop1_statistic(*half, *right, q, members, cfg.floor);
    points.push_back({{"sigma", r.sigma},
                      {"statistic", r.statistic},
                      {"ratio", r.ratio},
                      {"sample_size", r.sampleSize},
                      {"flagged", r.flagged}});
    rec.table("prop1").rows.push_back({q, r.sigma, r.statistic, r.ratio, r.sampleSize, r.flagged});
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  res.summary["family_size"] = members.size();
  res.summary["method"] = to_string(method);
  res.summary["points"] = std::move(points);
  res.summary["ratio_spread"] = lo > 0.0 ? hi / lo : INFINITY;
}

namespace detail {

/// P0 (primes only) and P (prime powers) at sigma0 + it for the whole group.
struct PrimeSums {
  std::vector<cplx> p0;
  std::vector<cplx> p;
  double V = 0.0;
};

inline PrimeSums prime_sums(const DeskParams& params, const CharacterGroup& group, const SieveTables& tables) {
  const cplx s = params.point().s();
  return {batch_dirichlet_values(p_coeffs(PRange::primes_only, params, tables), s, group),
          batch_dirichlet_values(p_coeffs(PRange::full_x, params, tables), s, group),
          prime_sum_variance(params, tables)};
}

}  // namespace detail

inline void prop2_q(RunContext& ctx, RunRecord& rec, QResult& res) {
  const auto& cfg = ctx.config;
  const std::uint64_t q = res.q;
  const DeskParams params = cfg.desk_params(q);
  const auto group = build_group(q);
  const auto members = select_members(*group, cfg);
  detail::require_members(members, cfg);
  const auto sums = detail::prime_sums(params, *group, ctx.tables);

  std::vector<cplx> p0;
  std::vector<double> re;
  std::vector<double> gap;
  for (std::size_t i : members) {
    p0.push_back(sums.p0[i]);
    re.push_back(sums.p0[i].real());
    gap.push_back(std::abs(sums.p[i] - sums.p0[i]));
    res.rows.push_back({{"chi_index", i}, {"P0", detail::cplx_pair(sums.p0[i])}});
  }
  ojson moments = ojson::array();
  auto& table = rec.table("prop2_moments");
  for (std::uint64_t k = 1; k <= 6; ++k) {
    const MomentReport m = real_moment(re, k);
    const double pred = predicted_real_moment(k, sums.V);
    table.rows.push_back({q, "real", k, 0, m.empirical.real(), m.empirical.imag(), pred, m.stdError, m.sampleSize});
    moments.push_back({{"kind", "real"}, {"k", k}, {"empirical", m.empirical.real()}, {"predicted", pred},
                       {"std_error", m.stdError}});
  }
  for (std::uint64_t k = 1; k <= 3; ++k) {
    const MomentReport m = mixed_moment(p0, k, k);
    const double pred = predicted_diag_moment(k, params, ctx.tables);
    table.rows.push_back({q, "abs", k, k, m.empirical.real(), m.empirical.imag(), pred, m.stdError, m.sampleSize});
    moments.push_back({{"kind", "abs"}, {"k", k}, {"empirical", m.empirical.real()}, {"predicted", pred},
                       {"std_error", m.stdError}});
  }
  const EdfReport vx = edf_report(re, Normalization::paper_scale, std::sqrt(0.5 * sums.V));
  const EdfReport emp = edf_report(re, Normalization::empirical_scale, 1.0);
  const double ll = std::log(std::log(static_cast<double>(q)));
  const double meanGap = pairwise_sum(gap) / static_cast<double>(gap.size());
  res.summary["X"] = params.X;
  res.summary["sigma0"] = params.sigma0;
  res.summary["V_X"] = sums.V;
  res.summary["loglog_q"] = ll;
  res.summary["moments"] = std::move(moments);
  res.summary["edf_vx"] = detail::edf_json(vx);
  res.summary["ks_distance_empirical"] = emp.ksDistance;
  res.summary["mean_abs_P_minus_P0"] = meanGap;
  rec.table("prop2_summary")
      .rows.push_back({q, params.X, params.sigma0, sums.V, ll, vx.ksDistance, emp.ksDistance, meanGap, re.size()});
  detail::edf_plots(rec, "prop2", q, vx, "Re P0(sigma0+it) / sqrt(V_X/2)");
}

inline void prop3_q(RunContext& ctx, RunRecord& rec, QResult& res) {
  const auto& cfg = ctx.config;
  const std::uint64_t q = res.q;
  const DeskParams params = cfg.desk_params(q);
  const auto group = build_group(q);
  const auto members = select_members(*group, cfg);
  detail::require_members(members, cfg);
  const cplx s = params.point().s();
  const auto M = batch_dirichlet_values(mollifier_coeffs(MollifierPart::full, params, ctx.tables), s, *group);
  const auto P = batch_dirichlet_values(p_coeffs(PRange::full_x, params, ctx.tables), s, *group);
  std::vector<double> dev;
  for (std::size_t i : members) {
    dev.push_back(std::abs(M[i] * std::exp(P[i]) - 1.0));
    res.rows.push_back({{"chi_index", i}, {"deviation", dev.back()}});
  }
  const CoeffCheckReport check = m_script_coeff_check(params, ctx.tables);
  const bool truncated = mollifier_truncated(MollifierPart::full, params, ctx.tables);
  const double med = quantile(dev, 0.5);
  const double p90 = quantile(dev, 0.9);
  const double p99 = quantile(dev, 0.99);
  res.summary = {{"X", params.X},
                 {"Y", params.Y},
                 {"K1", params.K1},
                 {"K2", params.K2},
                 {"support_cap", params.supportCap},
                 {"sigma0", params.sigma0},
                 {"sample_size", dev.size()},
                 {"median", med},
                 {"p90", p90},
                 {"p99", p99},
                 {"coeff_statistic", check.statistic},
                 {"coeff_max_abs_b", check.maxAbsB},
                 {"coeff_property1", check.property1},
                 {"coeff_property2", check.property2},
                 {"coeff_property3", check.property3},
                 {"coeff_incomplete", check.incomplete},
                 {"support_truncated", truncated}};
  rec.table("prop3").rows.push_back({q, params.X, params.Y, params.K1, params.K2, params.supportCap, dev.size(), med,
                                     p90, p99, check.statistic, check.property1, check.property3, check.incomplete,
                                     truncated});
}

inline void prop4_q(RunContext& ctx, RunRecord& rec, QResult& res) {
  const auto& cfg = ctx.config;
  const std::uint64_t q = res.q;
  const DeskParams params = cfg.desk_params(q);
  const auto group = build_group(q);
  const GroupInfo info = group_info(*group);
  const auto members = select_members(*group, cfg);
  detail::require_members(members, cfg);
  const LMethod method = cfg.effective_method();

  std::vector<cplx> L(group->size(), 1.0);
  std::vector<bool> available(group->size(), true);
  std::vector<cplx> M(group->size(), 1.0);
  if (!cfg.stub) {
    const auto fam = ctx.cache.get(*group, info, params.point(), method);
    L = fam->values;
    available = fam->available;
    M = batch_dirichlet_values(mollifier_coeffs(MollifierPart::full, params, ctx.tables), params.point().s(), *group);
  }
  std::vector<double> sq;
  std::vector<double> absdev;
  std::uint64_t excluded = 0;
  std::uint64_t below = 0;
  for (std::size_t i : members) {
    const cplx d = 1.0 - L[i] * M[i];
    if (!available[i] || !std::isfinite(std::abs(d))) {
      ++excluded;
      continue;
    }
    sq.push_back(std::norm(d));
    absdev.push_back(std::abs(d));
    if (absdev.back() < 1.0) ++below;
    res.rows.push_back({{"chi_index", i}, {"abs_one_minus_LM", absdev.back()}});
  }
  if (sq.empty()) throw std::invalid_argument("no usable characters");
  const double mean = pairwise_sum(sq) / static_cast<double>(sq.size());
  const double med = quantile(absdev, 0.5);
  const double frac = static_cast<double>(below) / static_cast<double>(sq.size());
  res.summary = {{"method", to_string(method)},
                 {"sigma0", params.sigma0},
                 {"sample_size", sq.size()},
                 {"excluded", excluded},
                 {"mean_sq", mean},
                 {"median_abs", med},
                 {"frac_below_one", frac},
                 {"stub", cfg.stub},
                 {"support_truncated", mollifier_truncated(MollifierPart::full, params, ctx.tables)}};
  rec.table("prop4").rows.push_back({q, to_string(method), sq.size(), excluded, mean, med, frac, cfg.stub});
}

/// Per-character integrals of |L M|^2 Phi over the window centred at t0,
/// using `panels` Gauss-Legendre panels of 20 nodes.
inline std::vector<double> window_integrals(const CharacterGroup& group, const GroupInfo& info,
                                            const DeskParams& params, const CoeffSeries& mollifier,
                                            const SmoothWindow& window, std::uint64_t panels, LMethod method,
                                            bool stub, std::vector<bool>& available) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  std::vector<std::pair<double, double>> nodes;
  const double a = -window.half_width();
  const double width = 2.0 * window.half_width() / static_cast<double>(panels);
  for (std::uint64_t p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      nodes.emplace_back(mid + half * xs[i], half * ws[i]);
      if (xs[i] != 0.0) nodes.emplace_back(mid - half * xs[i], half * ws[i]);
    }
  }
  std::vector<std::vector<double>> terms(group.size());
  available.assign(group.size(), true);
  for (const auto& [u, w] : nodes) {
    const double phi = window.weight(u);
    if (phi == 0.0) continue;
    const ComplexPoint s{params.sigma0, params.t + u};
    if (stub) {
      for (auto& t : terms) t.push_back(w * phi);
      continue;
    }
    const FamilyLValues L = batch_L_values(s, group, method, info);
    const auto M = batch_dirichlet_values(mollifier, s.s(), group);
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (!L.available[i]) available[i] = false;
      terms[i].push_back(w * phi * std::norm(L.values[i] * M[i]));
    }
  }
  std::vector<double> out(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) out[i] = pairwise_sum(terms[i]);
  return out;
}

struct SmoothedRatio {
  double ratio = 0.0;
  std::vector<double> normalized;
  std::vector<std::size_t> used;
  std::uint64_t flagged = 0;
  std::uint64_t nodes = 0;
};

inline SmoothedRatio smoothed_ratio(const CharacterGroup& group, const GroupInfo& info, const DeskParams& params,
                                    const CoeffSeries& mollifier, const SmoothWindow& window,
                                    const std::vector<std::size_t>& members, LMethod method, bool stub) {
  // One panel per period of the fastest oscillation of |L M|^2 in t, and at
  // least window.nodes nodes.
  const double omega = 2.0 * std::log(static_cast<double>(group.modulus()) * static_cast<double>(params.supportCap));
  const auto by_freq = static_cast<std::uint64_t>(std::ceil(2.0 * window.half_width() * omega / (2.0 * std::numbers::pi)));
  const std::uint64_t panels = std::max<std::uint64_t>((window.nodes + 19) / 20, by_freq);
  std::vector<bool> avail;
  std::vector<bool> avail2;
  const auto coarse = window_integrals(group, info, params, mollifier, window, panels, method, stub, avail);
  const auto fine = window_integrals(group, info, params, mollifier, window, 2 * panels, method, stub, avail2);
  SmoothedRatio r;
  r.nodes = 20 * panels;
  for (std::size_t i : members) {
    if (!avail[i] || !avail2[i]) {
      ++r.flagged;
      continue;
    }
    if (!(std::abs(coarse[i] - fine[i]) <= 1e-6 * std::abs(fine[i]))) {
      ++r.flagged;
      continue;
    }
    r.used.push_back(i);
    r.normalized.push_back(fine[i] / window.integral());
  }
  if (r.normalized.empty()) throw std::invalid_argument("no character passed the quadrature check");
  r.ratio = pairwise_sum(r.normalized) / static_cast<double>(r.normalized.size());
  return r;
}

inline void prop4_smoothed_q(RunContext& ctx, RunRecord& rec, QResult& res) {
  const auto& cfg = ctx.config;
  const std::uint64_t q = res.q;
  const DeskParams params = cfg.desk_params(q);
  const auto group = build_group(q);
  const GroupInfo info = group_info(*group);
  const auto members = select_members(*group, cfg);
  detail::require_members(members, cfg);
  const LMethod method = cfg.effective_method();
  const CoeffSeries mollifier = mollifier_coeffs(MollifierPart::full, params, ctx.tables);
  const SmoothedRatio full = smoothed_ratio(*group, info, params, mollifier, cfg.window, members, method, cfg.stub);
  SmoothWindow halfWindow = cfg.window;
  halfWindow.T *= 0.5;
  const SmoothedRatio half = smoothed_ratio(*group, info, params, mollifier, halfWindow, members, method, cfg.stub);
  const double change = std::abs(half.ratio - full.ratio) / full.ratio;
  for (std::size_t j = 0; j < full.used.size(); ++j) {
    res.rows.push_back({{"chi_index", full.used[j]}, {"I_over_phi_hat", full.normalized[j]}});
  }
  res.summary = {{"method", to_string(method)},
                 {"T", cfg.window.T},
                 {"c", cfg.window.c},
                 {"nodes", full.nodes},
                 {"sample_size", full.used.size()},
                 {"flagged", full.flagged},
                 {"ratio", full.ratio},
                 {"ratio_half_T", half.ratio},
                 {"relative_change", change},
                 {"stub", cfg.stub}};
  rec.table("prop4_smoothed")
      .rows.push_back({q, to_string(method), cfg.window.T, cfg.window.c, full.nodes, full.used.size(), full.flagged,
                       full.ratio, half.ratio, change, cfg.stub});
}

inline void lemma1_q(RunContext& ctx, RunRecord& rec, QResult& res) {
  const auto& cfg = ctx.config;
  const std::uint64_t q = res.q;
  const DeskParams params = cfg.desk_params(q);
  const auto group = build_group(q);
  const auto members = select_members(*group, cfg);
  detail::require_members(members, cfg);
  const auto p0all = batch_dirichlet_values(p_coeffs(PRange::primes_only, params, ctx.tables),
                                            params.point().s(), *group);
  std::vector<cplx> p0;
  for (std::size_t i : members) p0.push_back(p0all[i]);
  ojson moments = ojson::array();
  for (std::uint64_t k = 0; k <= 3; ++k) {
    for (std::uint64_t l = 0; l <= 3; ++l) {
      if (k == 0 && l == 0) continue;
      const MomentReport m = mixed_moment(p0, k, l);
      const double pred = k == l ? predicted_diag_moment(k, params, ctx.tables) : 0.0;
      rec.table("lemma1").rows.push_back({q, k, l, m.empirical.real(), m.empirical.imag(), std::abs(m.empirical),
                                          pred, m.stdError, m.sampleSize});
      moments.push_back({{"k", k}, {"l", l}, {"empirical", detail::cplx_pair(m.empirical)}, {"predicted", pred},
                         {"std_error", m.stdError}});
    }
  }
  res.summary = {{"X", params.X},
                 {"sigma0", params.sigma0},
                 {"V_X", prime_sum_variance(params, ctx.tables)},
                 {"sample_size", p0.size()},
                 {"moments", std::move(moments)}};
}

inline void finish(RunRecord& rec, const ExperimentConfig& cfg) {
  const auto trend = [&](const char* name, const char* title, const char* key, const char* ylabel) {
    PlotSpec p{name, PlotKind::trend, title, "log q", ylabel, {}, {}};
    for (const auto& r : rec.results) {
      if (r.error || !r.summary.contains(key)) continue;
      p.x.push_back(std::log(static_cast<double>(r.q)));
      p.y.push_back(r.summary.at(key).get<double>());
    }
    rec.plots.push_back(std::move(p));
  };
  if (cfg.experiment == Experiment::prop4) trend("prop4_trend", "Family mean of |1 - LM|^2", "mean_sq", "mean");
  if (cfg.experiment == Experiment::prop4_smoothed) {
    trend("prop4_smoothed_trend", "Smoothed mollified moment ratio", "ratio", "ratio");
  }
  if (cfg.experiment == Experiment::prop3) trend("prop3_trend", "Median |M e^P - 1|", "median", "median");
}

/// Runs every q of the config. Failures of one q are recorded and the run
/// continues.
inline RunRecord run_experiment(const ExperimentConfig& cfg, LValueCache& cache) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec = make_record(cfg);
  const SieveTables tables(detail::sieve_limit(cfg));
  RunContext ctx{cfg, cache, tables};
  std::function<void(RunContext&, RunRecord&, QResult&)> step;
  switch (cfg.experiment) {
    case Experiment::theorem1:
      step = theorem1_q;
      break;
    case Experiment::prop1:
      step = prop1_q;
      break;
    case Experiment::prop2:
      step = prop2_q;
      break;
    case Experiment::prop3:
      step = prop3_q;
      break;
    case Experiment::prop4:
      step = prop4_q;
      break;
    case Experiment::prop4_smoothed:
      step = prop4_smoothed_q;
      break;
    case Experiment::lemma1:
      step = lemma1_q;
      break;
  }
  for (std::uint64_t q : cfg.qList) {
    QResult res;
    res.q = q;
    try {
      step(ctx, rec, res);
    } catch (const std::exception& e) {
      res.error = e.what();
      res.summary = ojson::object();
      res.rows.clear();
    }
    rec.results.push_back(std::move(res));
  }
  finish(rec, cfg);
  rec.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

inline RunRecord run_experiment(const ExperimentConfig& cfg) {
  LValueCache cache(cfg.cacheDir);
  return run_experiment(cfg, cache);
}

}  // namespace qclt::harness
