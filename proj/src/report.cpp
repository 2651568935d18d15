#include "bearraid/report.hpp"

#include <limits>

#include "bearraid/error.hpp"
#include "bearraid/format.hpp"

namespace bearraid {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json cents_json(const Cents& c) {
  if (c.value >= std::numeric_limits<std::int64_t>::min() && c.value <= std::numeric_limits<std::int64_t>::max()) {
    return Json(static_cast<std::int64_t>(c.value));
  }
  return Json(c.to_dollar_string());
}

Json dates_json(const auto& dates) {
  Json arr = Json::array();
  for (const Date& d : dates) arr.push_back(d.to_string());
  return arr;
}

Date date_from_json(const Json& j, const char* what) {
  if (!j.is_string()) throw InputError(std::string(what) + " must be an ISO date string");
  auto d = Date::parse(j.get<std::string>());
  if (!d) throw InputError(std::string(what) + ": invalid date '" + j.get<std::string>() + "'");
  return *d;
}

template <class T>
T number(const Json& j, const char* key) {
  if (!j.is_number()) throw InputError(std::string(key) + " must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw InputError(std::string(key) + " must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (j.get<std::int64_t>() < 0) throw InputError(std::string(key) + " must be non-negative");
    }
  }
  return j.get<T>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InputError(std::string("unknown key '") + key + "' in " + where);
  }
}

}  // namespace

Json to_json(const AlignmentReport& r) {
  return Json{{"schema", "bearraid.alignment/1"},
              {"price_rows", r.price_rows},
              {"short_rows", r.short_rows},
              {"aligned_days", r.aligned_days},
              {"dropped_price_only", r.dropped_price_only},
              {"dropped_short_only", r.dropped_short_only},
              {"dropped_dividends", r.dropped_dividends},
              {"reported_deltas", r.reported_deltas},
              {"differenced_deltas", r.differenced_deltas},
              {"reconciliation_gap_total", r.reconciliation_gap_total},
              {"reconciliation_gap_abs_total", r.reconciliation_gap_abs_total}};
}

Json to_json(const PowerLawFit& f) {
  return Json{{"model", "power_law"}, {"alpha", f.alpha},       {"c", f.c},
              {"x_min", f.x_min},     {"ks", f.ks},             {"alpha_stderr", f.alpha_stderr},
              {"n_points", f.n_points}};
}

Json to_json(const LaplaceFit& f) {
  return Json{{"model", "laplace"},     {"beta", f.beta},         {"gamma", f.gamma},
              {"ks", f.ks},             {"residual", f.residual}, {"iterations", f.iterations},
              {"n_samples", f.n_samples}};
}

Json to_json(const Anomaly& a) {
  return Json{{"date", a.date.to_string()},
              {"index", a.index},
              {"kind", to_string(a.kind)},
              {"R", a.r},
              {"Q", a.q},
              {"si_level_ratio", optional_number(a.si_level_ratio)},
              {"p_R", optional_number(a.p_r)},
              {"p_Q", optional_number(a.p_q)},
              {"notes", a.notes}};
}

Json to_json(const RaidCandidate& c) {
  return Json{{"open", to_json(c.open)},
              {"cover", to_json(c.cover)},
              {"separation", c.separation},
              {"baseline_gap", c.baseline_gap},
              {"baseline_gap_shares", c.baseline_gap_shares},
              {"p_joint", optional_number(c.p_joint)},
              {"waiting_time_years", optional_number(c.waiting_time_years)},
              {"profit_estimate_cents", cents_json(c.profit_estimate)},
              {"profit_estimate", c.profit_estimate.to_dollar_string()},
              {"off_market_residual", c.off_market_residual},
              {"screens",
               {{"dividend_arbitrage", to_string(c.screens.dividend)},
                {"alt_uptick_open", c.screens.alt_uptick_open},
                {"alt_uptick_cover", c.screens.alt_uptick_cover},
                {"off_market", c.screens.off_market}}}};
}

Json to_json(const LagReport& r) {
  Json scores = Json::array();
  for (const auto& s : r.scores) scores.push_back(optional_number(s));
  return Json{{"schema", "bearraid.ban_lag/1"},
              {"conclusive", r.conclusive},
              {"lag", r.conclusive ? Json(r.lag) : Json(nullptr)},
              {"best_lag", r.lag},
              {"score", r.score},
              {"scores", scores}};
}

Json to_json(const PlantedRaid& p) {
  return Json{{"open_index", p.open_index},     {"cover_index", p.cover_index},
              {"open_date", p.open_date.to_string()}, {"cover_date", p.cover_date.to_string()},
              {"open_delta", p.open_delta},     {"cover_delta", p.cover_delta},
              {"open_volume", p.open_volume},   {"cover_volume", p.cover_volume},
              {"restore_baseline", p.restore_baseline}};
}

Json to_json(const DetectorConfig& c) {
  return Json{{"r_open_min", c.r_open_min},
              {"q_min", c.q_min},
              {"pairing_window", c.pairing_window},
              {"baseline_tolerance", c.baseline_tolerance},
              {"joint_window", c.joint_window},
              {"trading_days_per_year", c.trading_days_per_year},
              {"x_min_quantile", c.x_min_quantile},
              {"exclude_dates", dates_json(c.fit_exclusions)},
              {"dividend_lookahead", c.dividend_lookahead},
              {"laplace_form", c.laplace_form == LaplaceForm::Normalized ? "normalized" : "caption"},
              {"window", c.metrics.window},
              {"lag", c.metrics.lag},
              {"alt_uptick_drop", c.metrics.uptick.max_drop},
              {"alt_uptick_inclusive", c.metrics.uptick.inclusive}};
}

Json fit_report_json(const TailFitReport& report, const DetectorConfig& config) {
  Json fits = Json::object();
  fits["r_positive"] = report.fits.r_positive ? to_json(*report.fits.r_positive) : Json(nullptr);
  fits["r_negative"] = report.fits.r_negative ? to_json(*report.fits.r_negative) : Json(nullptr);
  fits["q"] = report.fits.q ? to_json(*report.fits.q) : Json(nullptr);
  Json failures = Json::object();
  for (const auto& [name, what] : report.failures) failures[name] = what;
  return Json{{"schema", "bearraid.fit/1"},
              {"fits", fits},
              {"failures", failures},
              {"samples", {{"included", report.included}, {"excluded", report.excluded}}},
              {"excluded_dates", dates_json(report.excluded_dates)},
              {"exclusion_list", dates_json(config.fit_exclusions)},
              {"x_min_quantile", config.x_min_quantile}};
}

Json candidate_report_json(const MarketSeries& series, const DetectionResult& result,
                           const DetectorConfig& config) {
  Json candidates = Json::array();
  for (const auto& c : result.candidates) candidates.push_back(to_json(c));
  Json anomalies = Json::array();
  for (const auto& a : result.anomalies) anomalies.push_back(to_json(a));
  std::size_t scannable = 0;
  for (const auto& m : result.metrics) scannable += m.scannable();
  Json fit = fit_report_json(result.fit_report, config);
  fit.erase("schema");
  return Json{{"schema", "bearraid.candidates/1"},
              {"ticker", series.ticker()},
              {"days", series.size()},
              {"scannable_days", scannable},
              {"config", to_json(config)},
              {"fits", fit},
              {"anomalies", anomalies},
              {"candidates", candidates}};
}

Json ground_truth_json(const MarketSeries& series, std::span<const PlantedRaid> truth,
                       std::uint64_t seed) {
  Json raids = Json::array();
  for (const auto& p : truth) raids.push_back(to_json(p));
  return Json{{"schema", "bearraid.ground_truth/1"},
              {"ticker", series.ticker()},
              {"seed", seed},
              {"days", series.size()},
              {"raids", raids}};
}

void apply_detector_json(const Json& j, DetectorConfig& c) {
  if (!j.is_object()) throw InputError("detector settings must be a JSON object");
  reject_unknown(j,
                 {"r_open_min", "q_min", "pairing_window", "baseline_tolerance", "joint_window",
                  "trading_days_per_year", "x_min_quantile", "exclude_dates", "dividend_lookahead",
                  "laplace_form", "window", "lag", "alt_uptick_drop", "alt_uptick_inclusive"},
                 "detector settings");
  if (j.contains("r_open_min")) c.r_open_min = number<double>(j["r_open_min"], "r_open_min");
  if (j.contains("q_min")) c.q_min = number<double>(j["q_min"], "q_min");
  if (j.contains("pairing_window")) c.pairing_window = number<std::size_t>(j["pairing_window"], "pairing_window");
  if (j.contains("baseline_tolerance")) c.baseline_tolerance = number<double>(j["baseline_tolerance"], "baseline_tolerance");
  if (j.contains("joint_window")) c.joint_window = number<std::size_t>(j["joint_window"], "joint_window");
  if (j.contains("trading_days_per_year")) c.trading_days_per_year = number<int>(j["trading_days_per_year"], "trading_days_per_year");
  if (j.contains("x_min_quantile")) c.x_min_quantile = number<double>(j["x_min_quantile"], "x_min_quantile");
  if (j.contains("dividend_lookahead")) c.dividend_lookahead = number<std::size_t>(j["dividend_lookahead"], "dividend_lookahead");
  if (j.contains("window")) c.metrics.window = number<std::size_t>(j["window"], "window");
  if (j.contains("lag")) c.metrics.lag = number<std::size_t>(j["lag"], "lag");
  if (j.contains("alt_uptick_drop")) c.metrics.uptick.max_drop = number<double>(j["alt_uptick_drop"], "alt_uptick_drop");
  if (j.contains("alt_uptick_inclusive")) {
    if (!j["alt_uptick_inclusive"].is_boolean()) throw InputError("alt_uptick_inclusive must be a boolean");
    c.metrics.uptick.inclusive = j["alt_uptick_inclusive"].get<bool>();
  }
  if (j.contains("laplace_form")) {
    const Json& f = j["laplace_form"];
    if (f == "normalized") {
      c.laplace_form = LaplaceForm::Normalized;
    } else if (f == "caption") {
      c.laplace_form = LaplaceForm::Caption;
    } else {
      throw InputError("laplace_form must be \"normalized\" or \"caption\"");
    }
  }
  if (j.contains("exclude_dates")) {
    if (!j["exclude_dates"].is_array()) throw InputError("exclude_dates must be an array");
    c.fit_exclusions.clear();
    for (const auto& d : j["exclude_dates"]) c.fit_exclusions.insert(date_from_json(d, "exclude_dates"));
  }
}

SynthSpec synth_spec_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("synthetic spec must be a JSON object");
  reject_unknown(j, {"ticker", "background", "raids"}, "synthetic spec");
  SynthSpec spec;
  BackgroundSpec& b = spec.background;
  if (j.contains("ticker")) b.ticker = j["ticker"].get<std::string>();
  if (j.contains("background")) {
    const Json& g = j["background"];
    if (!g.is_object()) throw InputError("background must be a JSON object");
    reject_unknown(g,
                   {"n_days", "mean_volume", "volume_tail_alpha", "r_laplace", "r_positive_tail",
                    "base_short_interest", "price_start", "daily_volatility", "seed", "start_date"},
                   "background");
    if (g.contains("n_days")) b.n_days = number<std::size_t>(g["n_days"], "n_days");
    if (g.contains("mean_volume")) b.mean_volume = number<std::int64_t>(g["mean_volume"], "mean_volume");
    if (g.contains("volume_tail_alpha")) b.volume_tail_alpha = number<double>(g["volume_tail_alpha"], "volume_tail_alpha");
    if (g.contains("r_laplace")) {
      const Json& l = g["r_laplace"];
      reject_unknown(l, {"beta", "gamma"}, "r_laplace");
      if (l.contains("beta")) b.r_laplace.beta = number<double>(l["beta"], "beta");
      if (l.contains("gamma")) b.r_laplace.gamma = number<double>(l["gamma"], "gamma");
    }
    if (g.contains("r_positive_tail")) {
      const Json& p = g["r_positive_tail"];
      reject_unknown(p, {"c", "alpha"}, "r_positive_tail");
      if (p.contains("c")) b.r_tail_c = number<double>(p["c"], "c");
      if (p.contains("alpha")) b.r_tail_alpha = number<double>(p["alpha"], "alpha");
    }
    if (g.contains("base_short_interest")) b.base_short_interest = number<std::int64_t>(g["base_short_interest"], "base_short_interest");
    if (g.contains("price_start")) {
      const Json& p = g["price_start"];
      std::optional<Price> price = p.is_string() ? Price::parse(p.get<std::string>())
                                   : p.is_number() ? std::optional<Price>(Price::from_dollars(p.get<double>()))
                                                   : std::nullopt;
      if (!price) throw InputError("price_start must be a decimal price");
      b.price_start = *price;
    }
    if (g.contains("daily_volatility")) b.daily_volatility = number<double>(g["daily_volatility"], "daily_volatility");
    if (g.contains("seed")) b.seed = number<std::uint64_t>(g["seed"], "seed");
    if (g.contains("start_date")) b.start_date = date_from_json(g["start_date"], "start_date");
  }
  if (j.contains("raids")) {
    if (!j["raids"].is_array()) throw InputError("raids must be an array");
    for (const Json& r : j["raids"]) {
      reject_unknown(r,
                     {"open_day", "separation", "open_R", "open_Q", "price_drop_pct", "restore_baseline",
                      "cover_Q", "cover_fraction"},
                     "raid");
      RaidSpec raid;
      if (!r.contains("open_day")) throw InputError("raid needs open_day");
      raid.open_day = number<std::size_t>(r["open_day"], "open_day");
      if (r.contains("separation")) raid.separation = number<std::size_t>(r["separation"], "separation");
      if (r.contains("open_R")) raid.open_r = number<double>(r["open_R"], "open_R");
      if (r.contains("open_Q")) raid.open_q = number<double>(r["open_Q"], "open_Q");
      if (r.contains("price_drop_pct")) raid.price_drop_pct = number<double>(r["price_drop_pct"], "price_drop_pct");
      if (r.contains("restore_baseline")) raid.restore_baseline = r["restore_baseline"].get<bool>();
      if (r.contains("cover_Q")) raid.cover_q = number<double>(r["cover_Q"], "cover_Q");
      if (r.contains("cover_fraction")) raid.cover_fraction = number<double>(r["cover_fraction"], "cover_fraction");
      spec.raids.push_back(raid);
    }
  }
  b.validate();
  return spec;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string write_activity_csv(const MarketSeries& series) {
  std::string out =
      "date,high,low,close,adj_high,adj_low,adj_close,volume,short_interest,delta_short_interest\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const MarketDay& d = series[i];
    Price adj = series.adjustment(i);
    out += d.date.to_string() + ',' + d.high.to_string() + ',' + d.low.to_string() + ',' +
           d.close.to_string() + ',' + (d.high - adj).to_string() + ',' + (d.low - adj).to_string() + ',' +
           series.adjusted_close()[i].to_string() + ',' + std::to_string(d.volume) + ',' +
           std::to_string(d.short_interest) + ',' +
           (d.delta_short ? std::to_string(*d.delta_short) : std::string()) + '\n';
  }
  return out;
}

std::string write_scatter_csv(std::span<const DayMetrics> metrics) {
  std::string out = "date,Q,R\n";
  for (const auto& m : metrics) {
    if (!m.scannable()) continue;
    out += m.date.to_string() + ',' + format_number(*m.q) + ',' + format_number(*m.r) + '\n';
  }
  return out;
}

}  // namespace bearraid
