#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "bearraid/detector.hpp"
#include "bearraid/market_data.hpp"
#include "bearraid/synthetic.hpp"

namespace bearraid {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const AlignmentReport& report);
Json to_json(const PowerLawFit& fit);
Json to_json(const LaplaceFit& fit);
Json to_json(const Anomaly& anomaly);
Json to_json(const RaidCandidate& candidate);
Json to_json(const LagReport& report);
Json to_json(const PlantedRaid& raid);
Json to_json(const DetectorConfig& config);

Json fit_report_json(const TailFitReport& report, const DetectorConfig& config);
Json candidate_report_json(const MarketSeries& series, const DetectionResult& result,
                           const DetectorConfig& config);
Json ground_truth_json(const MarketSeries& series, std::span<const PlantedRaid> truth,
                       std::uint64_t seed);

/// Reads detector settings present in `j` over `config`; unknown keys are rejected.
void apply_detector_json(const Json& j, DetectorConfig& config);
SynthSpec synth_spec_from_json(const Json& j);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const Json& j);

/// Plot data for the price/volume/short-interest panels:
/// raw and dividend-adjusted high/low/close with S, V and ΔS.
std::string write_activity_csv(const MarketSeries& series);

/// `date,Q,R` for every scannable day.
std::string write_scatter_csv(std::span<const DayMetrics> metrics);

}  // namespace bearraid
