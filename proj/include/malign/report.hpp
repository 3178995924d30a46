#ifndef MALIGN_REPORT_HPP
#define MALIGN_REPORT_HPP

#include <string>

#include <json.hpp>

#include "malign/aligner.hpp"
#include "malign/blocks.hpp"
#include "malign/experiments.hpp"
#include "malign/mc_stats.hpp"
#include "malign/stein.hpp"

namespace malign {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kCodeVersion = "1.0.0";
inline constexpr const char* kSchemaVersion = "1";

/// Stable 64-bit FNV-1a over the canonicalized config text.
std::uint64_t fnv1a64(const std::string& text);

/// Doubles in reports are rounded to 12 significant digits before
/// serialization so report bytes are platform-stable.
double round_sig12(double x);
ordered_json json_num(double x);

struct RunManifest {
    std::string command;   // subcommand name
    ordered_json config;   // canonical config, includes the seed
    std::uint64_t digest = 0;
    std::string code_version = kCodeVersion;
    double wall_ms = 0.0; // recorded here only, never in the report

    ordered_json to_json() const;
    static RunManifest from_json(const ordered_json& j);
};

RunManifest make_manifest(const std::string& command, const ordered_json& config);

// Instance and distribution JSON: {"sequences": [[...], ...]} and
// {"probs": [[...], ...]}.
Instance load_instance_json(const std::string& text);
Instance load_instance_file(const std::string& path);
SequenceDistribution load_distribution_file(const std::string& path, int alphabet, int m);

ordered_json to_json(const AlignmentResult& r, const ScoreModel& model);
ordered_json to_json(const BlockDecomposition& d);
ordered_json to_json(const GammaCurveReport& r);
ordered_json to_json(const SurfaceReport& r);
ordered_json to_json(const HoeffdingReport& r);
ordered_json to_json(const CltSeries& r);
ordered_json to_json(const SteinEstimate& r);
ordered_json to_json(const BoundReport& r);
ordered_json to_json(const BmReport& r);
ordered_json to_json(const PermReport& r);

std::string csv_of(const GammaCurveReport& r);
std::string csv_of(const SurfaceReport& r);
std::string csv_of(const HoeffdingReport& r);
std::string csv_of(const CltSeries& r); // header n,var_hat,var_per_n,dk,dk_band,skew,kurt

/// Line chart, x log-scaled, with the plotted table embedded in a comment
/// `<!-- data: x,y;x,y;... -->` for audits. Empty input yields an empty string.
std::string svg_line_chart(const std::vector<double>& xs, const std::vector<double>& ys,
                           const std::string& x_label, const std::string& y_label);

struct EmitFormats {
    bool csv = false;
    bool svg = false;
};

/// Writes <base>.json (always), optional <base>.csv / <base>.svg, and
/// <base>.manifest.json. The report JSON carries schema and digest but no
/// timing, so regeneration from the manifest is byte-identical.
void emit_report(const ordered_json& report, const RunManifest& manifest, const std::string& base,
                 const EmitFormats& formats, const std::string& csv = "",
                 const std::string& svg = "");

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace malign

#endif
