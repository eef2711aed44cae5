#include "gazelink/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "gazelink/error.hpp"
#include "gazelink/linking.hpp"
#include "gazelink/metrics.hpp"
#include "gazelink/serialize.hpp"
#include "gazelink/signal.hpp"

namespace gazelink {

namespace fs = std::filesystem;

namespace {

struct SessionResult {
    std::optional<LoadedSession> loaded;
    BundleSession bundle;
    std::exception_ptr error;
};

// Runs fn(i) for i in [0, n) on a small pool; each index is handled exactly once.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

void process(const fs::path& manifest, const PipelineConfig& config, SessionResult& out) {
    try {
        out.loaded = load_session(manifest, config.ingest_options());
        const Session& s = out.loaded->session;
        const Stimulus& stim = out.loaded->stimulus;
        try {
            BundleSession& b = out.bundle;
            b.subject_id = s.subject_id;
            b.stimulus_id = s.stimulus_id;
            b.validation = out.loaded->report;
            b.utterances = s.utterances;
            b.fixations = detect_fixations(s.gaze, s.scroll, config.fixation_params());
            b.mouse_activity = classify_mouse_activity(s.mouse, s.scroll, s.time_range(), config.mouse_activity_params());
            b.links = link_session(s, stim, b.fixations, config.link_config());
            b.paths = build_paths(s, b.fixations, config.link_config());
        } catch (const std::exception& e) {
            throw Error(manifest.string() + ": " + e.what());
        }
    } catch (...) {
        out.error = std::current_exception();
    }
}

std::string error_text(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

bool same_layout(const Stimulus& a, const Stimulus& b) {
    return a.page_width == b.page_width && a.page_height == b.page_height && a.viewport_width == b.viewport_width &&
           a.viewport_height == b.viewport_height && a.aois == b.aois;
}

std::string bundle_relative(const std::string& screenshot, const fs::path& bundle_dir) {
    if (screenshot.empty() || bundle_dir.empty()) return screenshot;
    const fs::path target = fs::weakly_canonical(fs::absolute(screenshot));
    const fs::path base = fs::weakly_canonical(fs::absolute(bundle_dir));
    return target.lexically_relative(base).generic_string();
}

}  // namespace

StudyBundle run_pipeline(std::span<const fs::path> manifests, const PipelineConfig& config, const PipelineOptions& options) {
    config.validate();
    std::vector<SessionResult> results(manifests.size());
    parallel_for(manifests.size(), options.threads, [&](std::size_t i) { process(manifests[i], config, results[i]); });

    StudyBundle bundle;
    bundle.config = config;
    std::map<std::string, std::size_t> stimulus_index;
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<SessionLinks> for_report;

    for (std::size_t i = 0; i < results.size(); ++i) {
        auto& r = results[i];
        if (!r.error && r.loaded) {
            const Stimulus& stim = r.loaded->stimulus;
            const auto key = std::make_pair(r.loaded->session.subject_id, r.loaded->session.stimulus_id);
            try {
                if (!seen.insert(key).second) {
                    throw ValidationError(manifests[i].string() + ": duplicate session for subject '" + key.first +
                                          "' on stimulus '" + key.second + "'");
                }
                auto it = stimulus_index.find(stim.id);
                if (it != stimulus_index.end() && !same_layout(bundle.stimuli[it->second], stim)) {
                    throw ValidationError(manifests[i].string() + ": AOI layout of stimulus '" + stim.id +
                                          "' differs from an earlier session");
                }
            } catch (...) {
                r.error = std::current_exception();
            }
        }
        if (r.error) {
            if (!options.skip_invalid) std::rethrow_exception(r.error);
            bundle.skipped.push_back({manifests[i].generic_string(), error_text(r.error)});
            continue;
        }
        const Stimulus& stim = r.loaded->stimulus;
        if (!stimulus_index.contains(stim.id)) {
            stimulus_index[stim.id] = bundle.stimuli.size();
            Stimulus copy = stim;
            copy.screenshot = bundle_relative(stim.screenshot, options.bundle_dir);
            bundle.stimuli.push_back(std::move(copy));
        }
        bundle.sessions.push_back(std::move(r.bundle));
    }

    std::size_t k = 0;
    for (auto& r : results) {
        if (r.error) continue;
        for_report.push_back({&r.loaded->session, bundle.sessions[k++].links});
    }
    std::sort(bundle.stimuli.begin(), bundle.stimuli.end(), [](const Stimulus& a, const Stimulus& b) { return a.id < b.id; });
    bundle.report = summarize_study(for_report, config);
    return bundle;
}

std::vector<ManifestCheck> validate_manifests(std::span<const fs::path> manifests, const PipelineConfig& config) {
    std::vector<ManifestCheck> out(manifests.size());
    parallel_for(manifests.size(), 0, [&](std::size_t i) {
        out[i].manifest = manifests[i];
        try {
            out[i].report = load_session(manifests[i], config.ingest_options()).report;
            out[i].ok = true;
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

StudyBundle export_bundle(const fs::path& bundle_file, const fs::path& out_dir, const fs::path& ui_dir) {
    StudyBundle bundle = read_bundle(bundle_file);
    fs::create_directories(out_dir);
    if (!ui_dir.empty()) {
        if (!fs::is_directory(ui_dir)) throw Error("UI asset directory '" + ui_dir.string() + "' does not exist");
        fs::copy(ui_dir, out_dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    }
    const fs::path base = bundle_file.parent_path();
    for (auto& stim : bundle.stimuli) {
        if (stim.screenshot.empty()) continue;
        const fs::path src = base / stim.screenshot;
        if (!fs::exists(src)) throw Error("screenshot '" + src.string() + "' for stimulus '" + stim.id + "' not found");
        const fs::path rel = fs::path("screenshots") / (stim.id + src.extension().string());
        fs::create_directories(out_dir / "screenshots");
        fs::copy_file(src, out_dir / rel, fs::copy_options::overwrite_existing);
        stim.screenshot = rel.generic_string();
    }
    write_bundle(out_dir / "bundle.json", bundle);
    return bundle;
}

}  // namespace gazelink
