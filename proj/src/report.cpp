#include "immunotrack/report.hpp"

#include "immunotrack/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace immunotrack {
namespace {

using Json = nlohmann::ordered_json;

Json typed_value(const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    std::uint64_t u = 0;
    auto [up, uec] = std::from_chars(v.data(), v.data() + v.size(), u);
    if (!v.empty() && uec == std::errc{} && up == v.data() + v.size()) return u;
    double d = 0.0;
    auto [dp, dec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (!v.empty() && dec == std::errc{} && dp == v.data() + v.size()) return d;
    return v;
}

std::string untyped_value(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

Json config_json(const RunConfig& config, const WarmupState& warmup) {
    Json out = Json::object();
    for (const auto& [key, value] : config_entries(config)) {
        // The destination path does not influence results; leaving it out keeps
        // reports written to different files byte-identical.
        if (key == "output") continue;
        const bool text = key == "input" || key == "synth_pattern";
        out[key] = text ? Json(value) : typed_value(value);
    }
    out["resolved"] = {
        {"baseline_scale", warmup.baseline_scale},
        {"signature_eps", warmup.signature_eps},
        {"dir_eps", warmup.dir_eps},
        {"warmup_mean", warmup.stats.mean},
        {"warmup_stddev", warmup.stats.stddev},
    };
    return out;
}

Json sequence_json(const TrackerSequence& seq) {
    Json out = Json::array();
    for (const SequenceEntry& e : seq.entries) {
        out.push_back({{"start", e.start_generation},
                       {"end", e.end_generation},
                       {"signature", e.sig},
                       {"movements", e.movements},
                       {"dominance", e.dominance}});
    }
    return out;
}

Json patterns_json(const TrackerSequence& seq) {
    Json out = Json::array();
    for (const Pattern& p : seq.patterns) {
        out.push_back({{"signature_tuples", p.tuples}, {"count", p.count}, {"starts", p.starts}});
    }
    return out;
}

Json tracker_json(const Tracker& t) {
    return {{"id", t.id},
            {"lineage", t.lineage_id},
            {"length", t.length()},
            {"stimulation", t.stimulation},
            {"misses", t.consecutive_misses},
            {"birth", t.birth_generation},
            {"movements", t.movements}};
}

Json pool_summary_json(const std::vector<Tracker>& pool) {
    std::map<std::size_t, std::size_t> hist;
    for (const Tracker& t : pool) ++hist[t.length()];
    Json histogram = Json::array();
    for (auto [len, n] : hist) histogram.push_back({{"length", len}, {"count", n}});

    std::vector<const Tracker*> ranked;
    for (const Tracker& t : pool) ranked.push_back(&t);
    std::sort(ranked.begin(), ranked.end(),
              [](const Tracker* a, const Tracker* b) { return outranks(*a, *b); });
    Json top = Json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(10, ranked.size()); ++i) {
        top.push_back(tracker_json(*ranked[i]));
    }
    return {{"size", pool.size()}, {"length_histogram", histogram}, {"top_by_stimulation", top}};
}

Json metrics_json(const EvalReport& report) {
    Json out = Json::object();
    for (const ModelMetrics& m : report.metrics) {
        out[m.model] = {{"mae", m.mae}, {"rmse", m.rmse}, {"dir_acc", m.dir_acc}};
    }
    out["steps"] = report.steps;
    return out;
}

Json contributors_json(const Forecast& f) {
    Json out = Json::array();
    for (const Contributor& c : f.contributors) {
        out.push_back({{"signature", c.sig}, {"affinity", c.affinity}, {"split", c.split}});
    }
    return out;
}

[[noreturn]] void bad_artifact(const std::string& why) {
    throw Error("cli", "BadArtifact", why);
}

}  // namespace

std::string evaluation_report_json(const RunConfig& config, const EvalReport& report) {
    Json doc = Json::object();
    doc["config"] = config_json(config, report.run.warmup);
    doc["metrics"] = metrics_json(report);
    doc["sequence"] = sequence_json(report.run.sequence);
    doc["patterns"] = patterns_json(report.run.sequence);
    doc["pool_summary"] = pool_summary_json(report.run.final_pool);
    Json forecasts = Json::array();
    for (const EvalRecord& r : report.records) {
        forecasts.push_back({{"anchor", r.anchor},
                             {"realized", r.realized},
                             {"predicted", r.forecast.predicted},
                             {"confidence", r.forecast.confidence},
                             {"persistence", r.persistence},
                             {"drift", r.drift},
                             {"last_movement", r.last_movement}});
    }
    doc["forecasts"] = std::move(forecasts);
    return doc.dump(2) + "\n";
}

std::string run_report_json(const RunConfig& config, const RunArtifacts& run) {
    Json doc = Json::object();
    doc["config"] = config_json(config, run.warmup);
    doc["metrics"] = Json::object();
    doc["sequence"] = sequence_json(run.sequence);
    doc["patterns"] = patterns_json(run.sequence);
    doc["pool_summary"] = pool_summary_json(run.final_pool);
    Json generations = Json::array();
    for (const GenerationReport& g : run.generations) {
        Json gen = {{"generation", g.generation},
                    {"binds", g.binds.size()},
                    {"clones", g.clones_created},
                    {"deaths_apoptosis", g.deaths_apoptosis},
                    {"deaths_cap", g.deaths_cap},
                    {"pool_size", g.pool_after}};
        if (g.dominant) {
            gen["dominant"] = {{"id", g.dominant->tracker.id},
                               {"clone_count", g.dominant->clone_count},
                               {"affinity", g.dominant->affinity}};
        } else {
            gen["dominant"] = nullptr;
        }
        generations.push_back(std::move(gen));
    }
    doc["generations"] = std::move(generations);
    Json pool = Json::array();
    for (const Tracker& t : run.final_pool) pool.push_back(tracker_json(t));
    doc["pool"] = std::move(pool);
    return doc.dump(2) + "\n";
}

std::string forecast_json(const Forecast& forecast, double last_price) {
    std::vector<double> path;
    double p = last_price;
    for (double m : forecast.predicted) path.push_back(p += m);
    Json doc = {{"anchor", forecast.anchor},
                {"horizon", forecast.horizon},
                {"predicted", forecast.predicted},
                {"confidence", forecast.confidence},
                {"last_price", last_price},
                {"price_path", path},
                {"contributors", contributors_json(forecast)}};
    return doc.dump(2) + "\n";
}

LoadedArtifact load_run_artifact(std::string_view json_text) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::exception& e) {
        bad_artifact(std::string("not valid JSON: ") + e.what());
    }
    for (const char* key : {"config", "sequence", "patterns", "pool_summary"}) {
        if (!doc.contains(key)) bad_artifact(std::string("missing key '") + key + "'");
    }
    LoadedArtifact out;
    try {
        const Json& cfg = doc["config"];
        for (const auto& [key, value] : cfg.items()) {
            if (key == "resolved") continue;
            set_config_value(out.config, key, untyped_value(value));
        }
        out.config.validate();
        const Json& resolved = cfg.at("resolved");
        out.warmup.baseline_scale = resolved.at("baseline_scale").get<double>();
        out.warmup.signature_eps = resolved.at("signature_eps").get<double>();
        out.warmup.dir_eps = resolved.at("dir_eps").get<double>();
        out.warmup.stats.mean = resolved.at("warmup_mean").get<double>();
        out.warmup.stats.stddev = resolved.at("warmup_stddev").get<double>();

        for (const Json& e : doc["sequence"]) {
            SequenceEntry entry;
            entry.start_generation = e.at("start").get<std::int64_t>();
            entry.end_generation = e.at("end").get<std::int64_t>();
            entry.sig = e.at("signature").get<Signature>();
            entry.movements = e.at("movements").get<MovementVector>();
            entry.dominance = e.at("dominance").get<std::size_t>();
            out.sequence.entries.push_back(std::move(entry));
        }
        for (const Json& p : doc["patterns"]) {
            Pattern pat;
            pat.tuples = p.at("signature_tuples").get<std::vector<Signature>>();
            pat.count = p.at("count").get<std::size_t>();
            pat.starts = p.at("starts").get<std::vector<std::size_t>>();
            out.sequence.patterns.push_back(std::move(pat));
        }
        if (doc.contains("pool")) {
            for (const Json& t : doc["pool"]) {
                Tracker tr;
                tr.id = t.at("id").get<std::uint64_t>();
                tr.lineage_id = t.at("lineage").get<std::uint64_t>();
                tr.stimulation = t.at("stimulation").get<std::uint64_t>();
                tr.consecutive_misses = t.at("misses").get<std::uint32_t>();
                tr.birth_generation = t.at("birth").get<std::int64_t>();
                tr.movements = t.at("movements").get<MovementVector>();
                out.pool.push_back(std::move(tr));
            }
        }
        if (doc.contains("generations")) out.generations = doc["generations"].size();
    } catch (const Json::exception& e) {
        bad_artifact(e.what());
    }
    return out;
}

std::string inspect_summary(const LoadedArtifact& a) {
    std::ostringstream os;
    os << "generations: " << a.generations << "\n";
    os << "live pool: " << a.pool.size() << " trackers\n";
    std::map<std::size_t, std::size_t> hist;
    for (const Tracker& t : a.pool) ++hist[t.length()];
    for (auto [len, n] : hist) os << "  length " << len << ": " << n << "\n";
    std::vector<const Tracker*> ranked;
    for (const Tracker& t : a.pool) ranked.push_back(&t);
    std::sort(ranked.begin(), ranked.end(),
              [](const Tracker* x, const Tracker* y) { return outranks(*x, *y); });
    for (std::size_t i = 0; i < std::min<std::size_t>(5, ranked.size()); ++i) {
        const Tracker& t = *ranked[i];
        os << "  #" << t.id << " stimulation " << t.stimulation << " length " << t.length()
           << " lineage " << t.lineage_id << "\n";
    }
    os << "tracker sequence: " << a.sequence.entries.size() << " entries\n";
    const auto ltp = long_term_pool(a.sequence);
    os << "long-term pool: " << ltp.size() << " distinct trackers\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(5, ltp.size()); ++i) {
        os << "  dwell " << ltp[i].dwell << " length " << ltp[i].movements.size() << "\n";
    }
    os << "patterns: " << a.sequence.patterns.size() << "\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(5, a.sequence.patterns.size()); ++i) {
        const Pattern& p = a.sequence.patterns[i];
        os << "  length " << p.tuples.size() << " x" << p.count << " first at entry "
           << p.starts.front() << "\n";
    }
    return os.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cli", "Io", "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("cli", "Io", "short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cli", "Io", "cannot move output into place at '" + path + "'");
    }
}

std::string read_file(const std::string& path, const char* module) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(module, "Io", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace immunotrack
