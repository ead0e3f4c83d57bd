#include <cmath>

#include "recurrence/report_tree.hpp"

namespace plab::recurrence {

using nlohmann::json;

// JSON has no infinities; non-finite values are written as strings.
json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json window_tree(const Window& w) {
  return {{"center", number(w.center)}, {"half_width", number(w.half_width)},
          {"lo", number(w.lo())}, {"hi", number(w.hi())}};
}

json grid_tree(const TauGrid& g) {
  return {{"min", number(g.min)}, {"max", number(g.max)}, {"step", number(g.step)}};
}

json returns_tree(const ReturnSequence& seq) {
  json times = json::array(), disc = json::array(), eps = json::array();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    times.push_back(number(seq.times[i]));
    disc.push_back(number(seq.discrepancies[i]));
    eps.push_back(number(seq.epsilon_schedule[i]));
  }
  return {{"times", times}, {"discrepancies", disc}, {"epsilon_schedule", eps}};
}

namespace {

json table_tree(const std::vector<DensityRow>& rows) {
  json t = json::array();
  for (const auto& r : rows)
    t.push_back({{"epsilon", number(r.epsilon)},
                 {"inclusion_length", number(r.inclusion_length)},
                 {"saturated", r.saturated},
                 {"shift_count", r.shift_count}});
  return t;
}

json entry(Tri verdict, json params, json witness, const Window& w) {
  return {{"verdict", to_string(verdict)}, {"params", std::move(params)},
          {"witness", std::move(witness)}, {"window", window_tree(w)}};
}

json density_entry(const DensityVerdict& v, const Window& w, const char* metric) {
  json params = {{"metric", metric}, {"table", table_tree(v.table)}, {"implied", v.implied}};
  json witness = nullptr;
  if (v.witness_epsilon) {
    for (const auto& r : v.table)
      if (r.epsilon == *v.witness_epsilon)
        witness = {{"epsilon", number(r.epsilon)}, {"inclusion_length", number(r.inclusion_length)}};
  }
  return entry(v.verdict, std::move(params), std::move(witness), w);
}

}  // namespace

json profile_tree(const ComparabilityProfile& p) {
  json pairs = json::array();
  for (const auto& r : p.pairs) {
    json row = {{"epsilon", number(r.epsilon)}, {"delta_hat", number(r.delta_hat)}};
    if (r.witness_tau) {
      row["witness_tau"] = number(*r.witness_tau);
      row["witness_dx"] = number(r.witness_dx);
      row["witness_dy"] = number(r.witness_dy);
    } else {
      row["witness_tau"] = nullptr;
    }
    pairs.push_back(row);
  }
  return {{"verdict", to_string(p.verdict)},
          {"pairs", pairs},
          {"zero_tolerance", number(p.zero_tolerance)},
          {"witness_tau", p.witness_tau ? json(number(*p.witness_tau)) : json(nullptr)},
          {"window", window_tree(p.window)},
          {"tau_grid", grid_tree(p.grid)}};
}

json report_tree(const RecurrenceReport& r) {
  const Window& w = r.window;
  json classes = json::object();

  {
    const auto& v = r.stationary;
    json witness = v.verdict == Tri::no ? json{{"deviation", number(v.deviation)}} : json(nullptr);
    classes["stationary"] =
        entry(v.verdict, {{"deviation", number(v.deviation)}, {"tolerance", number(v.tolerance)}},
              witness, w);
  }
  {
    const auto& v = r.periodic;
    json params = nullptr;
    json witness = nullptr;
    if (v.verdict == Tri::yes) {
      params = {{"period", number(v.period)}, {"discrepancy", number(v.discrepancy)},
                {"tolerance", number(v.tolerance)}};
    } else {
      params = {{"tolerance", number(v.tolerance)}};
      witness = {{"best_tau", v.best_tau ? json(number(*v.best_tau)) : json(nullptr)},
                 {"best_discrepancy", number(v.best_discrepancy)}};
    }
    classes["periodic"] = entry(v.verdict, params, witness, w);
  }
  {
    const auto& v = r.quasi_periodic;
    json freqs = json::array(), amps = json::array();
    for (double f : v.fit.freqs) freqs.push_back(number(f));
    for (double a : v.fit.amplitudes) amps.push_back(number(a));
    json params = {{"freqs", freqs},
                   {"amplitudes", amps},
                   {"residual", number(v.fit.residual)},
                   {"independent", v.fit.independent},
                   {"implied_by_period", v.from_period}};
    json witness = nullptr;
    if (v.verdict == Tri::no) {
      witness = {{"residual", number(v.fit.residual)}};
      if (v.fit.dependent_pair)
        witness["dependent_pair"] = {v.fit.dependent_pair->first, v.fit.dependent_pair->second};
    }
    classes["quasi_periodic"] = entry(v.verdict, params, witness, w);
  }
  classes["bohr_ap"] = density_entry(r.bohr, w, "sup");
  classes["almost_recurrent"] = density_entry(r.almost_recurrent, w, "bebutov");
  {
    const auto& v = r.poisson;
    json witness = v.verdict == Tri::yes ? json(nullptr) : json{{"returns_found", v.returns.size()}};
    classes["poisson"] = entry(v.verdict, returns_tree(v.returns), witness, w);
  }
  classes["pseudo_recurrent"] = entry(r.pseudo_recurrent.flag ? Tri::yes : Tri::no,
                                      {{"derived", true}}, nullptr, w);

  json out = {{"window", window_tree(w)},
              {"tau_grid", grid_tree(r.grid)},
              {"primary_class", r.primary_class()},
              {"classes", classes},
              {"notes", {"verdicts are evidence on the recorded window and grid, not proofs"}}};
  if (r.comparability) {
    const auto& ev = *r.comparability;
    json c = profile_tree(ev.profile);
    c["transferred"] = ev.transferred;
    c["levitan_evidence"] = ev.levitan_evidence;
    c["relative_to_supplied_base"] = true;
    json strong = json::array();
    for (const auto& p : ev.shifted_centers) strong.push_back(profile_tree(p));
    c["strong_comparability_proxy"] = strong;
    out["comparability"] = c;
  }
  return out;
}

std::string to_json(const RecurrenceReport& report, int indent) {
  return report_tree(report).dump(indent);
}

std::string to_json(const ComparabilityProfile& profile, int indent) {
  return profile_tree(profile).dump(indent);
}

}  // namespace plab::recurrence
