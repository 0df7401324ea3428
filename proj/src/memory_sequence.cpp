#include "immunotrack/memory_sequence.hpp"

#include "immunotrack/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace immunotrack {

Signature signature(std::span<const double> movements, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw Error("memory_sequence", "BadEpsilon", "epsilon must be finite and > 0");
    }
    Signature sig;
    sig.reserve(movements.size());
    for (double m : movements) sig.push_back(std::llround(m / eps));
    return sig;
}

void promote_dominant(const GenerationReport& report, TrackerSequence& sequence,
                      double eps) {
    if (!report.dominant) return;
    Signature sig = signature(report.dominant->tracker.movements, eps);
    const std::int64_t g = report.generation;
    if (!sequence.entries.empty()) {
        SequenceEntry& last = sequence.entries.back();
        if (g <= last.end_generation) {
            throw Error("memory_sequence", "OutOfOrder",
                        "generation " + std::to_string(g) + " is not after " +
                            std::to_string(last.end_generation));
        }
        if (last.sig == sig) {
            last.end_generation = g;
            return;
        }
    }
    sequence.entries.push_back(SequenceEntry{g, g, report.dominant->tracker.movements,
                                             report.dominant->clone_count,
                                             std::move(sig)});
}

std::vector<Pattern> generalize(std::span<const Signature> signatures,
                                std::size_t min_repeats, std::size_t max_pattern_len) {
    // Intern signatures so windows compare as small integer tuples.
    std::map<Signature, int> ids;
    std::vector<int> symbols;
    symbols.reserve(signatures.size());
    for (const Signature& s : signatures) {
        symbols.push_back(ids.emplace(s, static_cast<int>(ids.size())).first->second);
    }

    struct Candidate {
        std::size_t length;
        std::vector<std::size_t> starts;
    };
    std::vector<Candidate> found;
    const std::size_t n = symbols.size();
    for (std::size_t len = 1; len <= std::min(max_pattern_len, n); ++len) {
        std::map<std::vector<int>, std::vector<std::size_t>> positions;
        for (std::size_t i = 0; i + len <= n; ++i) {
            positions[std::vector<int>(symbols.begin() + static_cast<std::ptrdiff_t>(i),
                                       symbols.begin() + static_cast<std::ptrdiff_t>(i + len))]
                .push_back(i);
        }
        for (auto& [key, pos] : positions) {
            if (pos.size() < min_repeats) continue;
            std::vector<std::size_t> greedy;
            for (std::size_t p : pos) {
                if (greedy.empty() || p >= greedy.back() + len) greedy.push_back(p);
            }
            if (greedy.size() >= min_repeats) found.push_back({len, std::move(greedy)});
        }
    }

    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        if (a.length != b.length) return a.length > b.length;
        if (a.starts.size() != b.starts.size()) return a.starts.size() > b.starts.size();
        return a.starts.front() < b.starts.front();
    });

    std::vector<const Candidate*> reported;
    auto covered_by = [](const Candidate& shorter, const Candidate& longer) {
        for (std::size_t s : shorter.starts) {
            // Last occurrence of `longer` starting at or before s.
            auto it = std::upper_bound(longer.starts.begin(), longer.starts.end(), s);
            if (it == longer.starts.begin()) return false;
            --it;
            if (s + shorter.length > *it + longer.length) return false;
        }
        return true;
    };
    for (const Candidate& c : found) {
        const bool explained = std::any_of(reported.begin(), reported.end(),
                                           [&](const Candidate* r) {
                                               return r->length > c.length &&
                                                      covered_by(c, *r);
                                           });
        if (!explained) reported.push_back(&c);
    }

    std::vector<Pattern> out;
    out.reserve(reported.size());
    for (const Candidate* c : reported) {
        Pattern p;
        const std::size_t s0 = c->starts.front();
        p.tuples.assign(signatures.begin() + static_cast<std::ptrdiff_t>(s0),
                        signatures.begin() + static_cast<std::ptrdiff_t>(s0 + c->length));
        p.count = c->starts.size();
        p.starts = c->starts;
        out.push_back(std::move(p));
    }
    return out;
}

void generalize(TrackerSequence& sequence, std::size_t min_repeats,
                std::size_t max_pattern_len) {
    std::vector<Signature> sigs;
    sigs.reserve(sequence.entries.size());
    for (const SequenceEntry& e : sequence.entries) sigs.push_back(e.sig);
    sequence.patterns = generalize(sigs, min_repeats, max_pattern_len);
}

std::vector<PoolSnapshot> long_term_pool(const TrackerSequence& sequence) {
    std::vector<PoolSnapshot> out;
    std::map<Signature, std::size_t> index;
    for (std::size_t i = 0; i < sequence.entries.size(); ++i) {
        const SequenceEntry& e = sequence.entries[i];
        auto [it, inserted] = index.emplace(e.sig, out.size());
        if (inserted) {
            out.push_back(PoolSnapshot{e.movements, e.sig, e.span(), i});
        } else {
            out[it->second].dwell += e.span();
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const PoolSnapshot& a, const PoolSnapshot& b) {
        return a.dwell > b.dwell;
    });
    return out;
}

}  // namespace immunotrack
