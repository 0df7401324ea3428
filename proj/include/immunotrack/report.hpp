#pragma once

#include "immunotrack/config.hpp"
#include "immunotrack/forecast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace immunotrack {

// JSON documents. Keys appear in a fixed order and every double is written
// with its shortest round-trip decimal form, so identical runs are
// byte-identical.
//
// Evaluation report: config, metrics, sequence, patterns, pool_summary, forecasts.
// Run artifact:      config, metrics ({}), sequence, patterns, pool_summary,
//                    generations, pool.

std::string evaluation_report_json(const RunConfig& config, const EvalReport& report);
std::string run_report_json(const RunConfig& config, const RunArtifacts& run);
std::string forecast_json(const Forecast& forecast, double last_price);

/// What `forecast` and `inspect` need back from a saved run artifact.
struct LoadedArtifact {
    RunConfig config;
    WarmupState warmup;
    TrackerSequence sequence;
    std::vector<Tracker> pool;
    std::size_t generations = 0;
};

/// Throws cli.BadArtifact when the document does not follow the run schema.
LoadedArtifact load_run_artifact(std::string_view json_text);

/// Human-readable pool / sequence / pattern summary.
std::string inspect_summary(const LoadedArtifact& artifact);

/// Writes via a sibling temp file and rename. Throws cli.Io.
void write_file_atomic(const std::string& path, std::string_view content);
std::string read_file(const std::string& path, const char* module = "cli");

}  // namespace immunotrack
