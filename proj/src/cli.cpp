#include "bearraid/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bearraid/error.hpp"
#include "bearraid/format.hpp"
#include "bearraid/report.hpp"

namespace bearraid::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "bearraid 1.0.0";

Json parse_json_file(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Date require_date(const std::string& text, const char* what) {
  auto d = Date::parse(text);
  if (!d) throw InputError(std::string(what) + ": invalid date '" + text + "'");
  return *d;
}

SynthSpec synth_from_value(const Json& value, const fs::path& base) {
  if (value.is_string()) return synth_spec_from_json(parse_json_file(base / value.get<std::string>()));
  return synth_spec_from_json(value);
}

std::string empirical_overlay(const EcdfPoints& points) {
  std::string out = "x,empirical_p,fitted_p\n";
  for (const auto& pt : points.points) out += format_number(pt.x) + ',' + format_number(pt.p) + ",\n";
  return out;
}

void write_sidecar(const RunConfig& config, const std::string& command) {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  Json meta{{"tool", kToolVersion},
            {"command", command},
            {"generated_at", stamp},
            {"input_mode", config.synth ? "synth" : "files"}};
  if (config.price) meta["price"] = config.price->string();
  if (config.shorts) meta["short"] = config.shorts->string();
  write_atomic(config.out / "run_meta.json", dump(meta));
}

LoadedInputs load_for_analysis(const RunConfig& config) {
  config.validate();
  config.detector.validate();
  LoadedInputs inputs = load_inputs(config);
  const std::size_t needed = config.detector.metrics.window + 1;
  if (inputs.built.series.size() < needed) {
    throw InputError("insufficient data for " + std::to_string(config.detector.metrics.window) +
                     "-day warm-up: " + std::to_string(inputs.built.series.size()) +
                     " aligned days, need at least " + std::to_string(needed));
  }
  fs::create_directories(config.out);
  write_atomic(config.out / "alignment.json", dump(to_json(inputs.built.report)));
  return inputs;
}

}  // namespace

void RunConfig::validate() const {
  bool files = price.has_value() || shorts.has_value();
  if (files && synth) throw InputError("configure either price/short files or a synthetic spec, not both");
  if (!files && !synth) throw InputError("no input: pass --price and --short or a synth spec");
  if (files && !(price && shorts)) throw InputError("both --price and --short are required");
  if (format_version != 1) throw InputError("unsupported format_version " + std::to_string(format_version));
}

RunConfig load_run_config(const fs::path& path) {
  Json j = parse_json_file(path);
  if (!j.is_object()) throw InputError(path.string() + ": config must be a JSON object");
  const fs::path base = path.parent_path();
  RunConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "price") {
      config.price = base / value.get<std::string>();
    } else if (key == "short") {
      config.shorts = base / value.get<std::string>();
    } else if (key == "synth") {
      config.synth = synth_from_value(value, base);
    } else if (key == "out") {
      config.out = base / value.get<std::string>();
    } else if (key == "ticker") {
      config.ticker = value.get<std::string>();
    } else if (key == "detector") {
      apply_detector_json(value, config.detector);
    } else if (key == "ban_window") {
      config.ban_window = {require_date(value.at("start").get<std::string>(), "ban_window.start"),
                           require_date(value.at("end").get<std::string>(), "ban_window.end")};
    } else if (key == "format_version") {
      config.format_version = value.get<int>();
    } else {
      throw InputError(path.string() + ": unknown config key '" + key + "'");
    }
  }
  return config;
}

LoadedInputs load_inputs(const RunConfig& config) {
  if (config.synth) {
    SynthOutput synth = synthesize(*config.synth);
    AlignmentReport report;
    report.price_rows = report.short_rows = report.aligned_days = synth.series.size();
    report.differenced_deltas = synth.series.size() > 0 ? synth.series.size() - 1 : 0;
    return {BuildResult{std::move(synth.series), report}, std::move(synth.truth)};
  }
  auto parse = [](const fs::path& path, auto parser) {
    try {
      return parser(read_file(path));
    } catch (const InputError& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  };
  auto bars = parse(*config.price, [](const std::string& s) { return parse_price_csv(s); });
  auto shorts = parse(*config.shorts, [](const std::string& s) { return parse_short_csv(s); });
  return {build_series(bars, shorts, config.ticker), {}};
}

void cmd_fit(const RunConfig& config) {
  LoadedInputs inputs = load_for_analysis(config);
  auto metrics = compute_metrics(inputs.built.series, config.detector.metrics);
  TailFitReport report = fit_tails(metrics, config.detector);
  const auto& fits = report.fits;
  write_atomic(config.out / "cdf_r_positive.csv",
               fits.r_positive ? write_overlay_csv(report.r_upper, *fits.r_positive) : empirical_overlay(report.r_upper));
  write_atomic(config.out / "cdf_r_negative.csv",
               fits.r_negative ? write_overlay_csv(report.r_lower, *fits.r_negative) : empirical_overlay(report.r_lower));
  write_atomic(config.out / "cdf_q.csv",
               fits.q ? write_overlay_csv(report.q_upper, *fits.q) : empirical_overlay(report.q_upper));
  write_atomic(config.out / "fit_report.json", dump(fit_report_json(report, config.detector)));
  write_sidecar(config, "fit");
}

void cmd_scan(const RunConfig& config) {
  LoadedInputs inputs = load_for_analysis(config);
  const MarketSeries& series = inputs.built.series;
  DetectionResult result = detect(series, config.detector);
  write_atomic(config.out / "metrics.csv", write_metrics_csv(result.metrics));
  write_atomic(config.out / "scatter.csv", write_scatter_csv(result.metrics));
  write_atomic(config.out / "market_activity.csv", write_activity_csv(series));
  write_atomic(config.out / "candidates.json", dump(candidate_report_json(series, result, config.detector)));
  write_sidecar(config, "scan");
}

void cmd_screen_ban(const RunConfig& config, Date ban_start, Date ban_end) {
  config.validate();
  LoadedInputs inputs = load_inputs(config);
  auto records = short_records(inputs.built.series);
  LagReport report = reporting_lag_check(records, ban_start, ban_end);
  Json j = to_json(report);
  j["ban_window"] = {{"start", ban_start.to_string()}, {"end", ban_end.to_string()}};
  fs::create_directories(config.out);
  write_atomic(config.out / "ban_lag.json", dump(j));
  write_sidecar(config, "screen-ban");
}

void cmd_synth(const SynthSpec& spec, const fs::path& out) {
  SynthOutput synth = synthesize(spec);
  fs::create_directories(out);
  write_atomic(out / "prices.csv", write_price_csv(synth.series));
  write_atomic(out / "shorts.csv", write_short_csv(synth.series));
  write_atomic(out / "ground_truth.json", dump(ground_truth_json(synth.series, synth.truth, spec.background.seed)));
}

void write_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bear-raid candidate detection in daily short-interest data", "bearraid"};
  app.require_subcommand(1);

  struct Options {
    std::string config, price, shorts, out, ticker, exclude, ban_start, ban_end;
    std::optional<std::uint64_t> seed;
    std::optional<double> r_open_min, q_min, x_min_quantile;
    std::optional<std::size_t> pairing_window;
  } o;

  auto add_common = [&](CLI::App* sub, bool analysis) {
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Seed for the synthetic generator");
    if (!analysis) return;
    sub->add_option("--price", o.price, "Price CSV");
    sub->add_option("--short", o.shorts, "Short-interest CSV");
    sub->add_option("--ticker", o.ticker, "Ticker symbol for reports");
    sub->add_option("--r-open-min", o.r_open_min, "Open/cover threshold on |R|");
    sub->add_option("--q-min", o.q_min, "Open threshold on Q");
    sub->add_option("--pairing-window", o.pairing_window, "Max trading days from open to cover");
    sub->add_option("--x-min-quantile", o.x_min_quantile, "Power-law threshold quantile");
    sub->add_option("--exclude-dates", o.exclude, "Comma-separated dates left out of fits");
  };
  CLI::App* fit = app.add_subcommand("fit", "Fit tail distributions of R and Q");
  CLI::App* scan = app.add_subcommand("scan", "Scan for raid candidates");
  CLI::App* ban = app.add_subcommand("screen-ban", "Estimate reporting lag from a short-sale ban");
  CLI::App* synth = app.add_subcommand("synth", "Generate synthetic input files");
  add_common(fit, true);
  add_common(scan, true);
  add_common(ban, true);
  add_common(synth, false);
  ban->add_option("--ban-start", o.ban_start, "First day of the ban window");
  ban->add_option("--ban-end", o.ban_end, "Last day of the ban window");

  std::vector<const char*> argv;
  argv.push_back("bearraid");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (synth->parsed()) {
      if (o.config.empty()) throw InputError("synth needs --config <spec.json>");
      Json j = parse_json_file(o.config);
      fs::path base = fs::path(o.config).parent_path();
      SynthSpec spec = j.contains("synth") ? synth_from_value(j["synth"], base) : synth_spec_from_json(j);
      if (o.seed) spec.background.seed = *o.seed;
      cmd_synth(spec, o.out.empty() ? fs::path("out") : fs::path(o.out));
      out << "wrote synthetic inputs to " << (o.out.empty() ? "out" : o.out) << "\n";
      return kExitOk;
    }

    RunConfig config = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (!o.price.empty() || !o.shorts.empty()) {
      config.synth.reset();
      if (!o.price.empty()) config.price = o.price;
      if (!o.shorts.empty()) config.shorts = o.shorts;
    }
    if (!o.out.empty()) config.out = o.out;
    if (!o.ticker.empty()) config.ticker = o.ticker;
    if (o.seed) {
      if (!config.synth) throw InputError("--seed applies only to synthetic input");
      config.synth->background.seed = *o.seed;
    }
    DetectorConfig& det = config.detector;
    if (o.r_open_min) det.r_open_min = *o.r_open_min;
    if (o.q_min) det.q_min = *o.q_min;
    if (o.pairing_window) det.pairing_window = *o.pairing_window;
    if (o.x_min_quantile) det.x_min_quantile = *o.x_min_quantile;
    if (!o.exclude.empty()) {
      det.fit_exclusions.clear();
      std::stringstream ss(o.exclude);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) det.fit_exclusions.insert(require_date(item, "--exclude-dates"));
      }
    }

    if (fit->parsed()) {
      cmd_fit(config);
      out << "wrote fit report to " << config.out.string() << "\n";
    } else if (scan->parsed()) {
      cmd_scan(config);
      out << "wrote candidate report to " << config.out.string() << "\n";
    } else {
      std::optional<std::pair<Date, Date>> window = config.ban_window;
      if (!o.ban_start.empty() || !o.ban_end.empty()) {
        if (o.ban_start.empty() || o.ban_end.empty()) throw InputError("give both --ban-start and --ban-end");
        window = {require_date(o.ban_start, "--ban-start"), require_date(o.ban_end, "--ban-end")};
      }
      if (!window) throw InputError("screen-ban needs a ban window");
      cmd_screen_ban(config, window->first, window->second);
      out << "wrote ban lag report to " << config.out.string() << "\n";
    }
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Json::exception& e) {
    err << "error: invalid JSON value: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace bearraid::cli
