#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gazelink/bundle.hpp"
#include "gazelink/config.hpp"
#include "gazelink/error.hpp"
#include "gazelink/ingest.hpp"
#include "gazelink/metrics.hpp"
#include "gazelink/pipeline.hpp"
#include "gazelink/render.hpp"
#include "gazelink/serialize.hpp"
#include "gazelink/synth.hpp"

namespace gazelink::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigFlags {
    std::string config_file;
    std::optional<TimeMs> padding_ms;
    std::string aggregation;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
    cmd->add_option("--config", flags.config_file, "Pipeline configuration (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--padding-ms", flags.padding_ms, "Pad every utterance window by this many ms on both sides");
    cmd->add_option("--aggregation", flags.aggregation, "Hit-rate aggregation")->check(CLI::IsMember({"micro", "macro"}));
}

PipelineConfig build_config(const ConfigFlags& flags) {
    try {
        PipelineConfig c;
        if (!flags.config_file.empty()) c = parse_pipeline_config(read_text_file(flags.config_file), flags.config_file);
        if (flags.padding_ms) c.padding_before_ms = c.padding_after_ms = *flags.padding_ms;
        if (!flags.aggregation.empty()) c.aggregation = parse_aggregation(flags.aggregation);
        c.validate();
        return c;
    } catch (const Error& e) {
        throw UsageError(std::string("invalid configuration: ") + e.what());
    }
}

// A `.txt` argument is a list of manifest paths, one per line, relative to the list.
std::vector<fs::path> expand_manifests(const std::vector<std::string>& inputs) {
    std::vector<fs::path> out;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (p.extension() != ".txt") {
            out.push_back(p);
            continue;
        }
        std::istringstream lines(read_text_file(p));
        for (std::string line; std::getline(lines, line);) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (!line.empty() && line.front() != '#') out.push_back(p.parent_path() / line);
        }
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Link think-aloud utterances to page areas via gaze and mouse data", "gazelink"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gazelink 0.1.0");

    ConfigFlags flags;
    std::vector<std::string> manifests;
    std::string output, bundle_path, stimulus_id, spec_path, ui_dir;
    bool skip_invalid = false;

    auto* validate = app.add_subcommand("validate", "Ingest sessions and report problems");
    validate->add_option("manifests", manifests, "Session manifests (or .txt lists of them)")->required();
    add_config_flags(validate, flags);

    auto* link = app.add_subcommand("link", "Run the full pipeline and write a study bundle");
    link->add_option("manifests", manifests, "Session manifests (or .txt lists of them)")->required();
    link->add_option("-o,--output", output, "Bundle file to write")->required();
    link->add_flag("--skip-invalid", skip_invalid, "Record failing sessions instead of aborting");
    add_config_flags(link, flags);

    auto* metrics = app.add_subcommand("metrics", "Print the study report of a bundle");
    metrics->add_option("bundle", bundle_path, "Study bundle")->required()->check(CLI::ExistingFile);

    auto* render = app.add_subcommand("render", "Render a sentiment map for one stimulus");
    render->add_option("bundle", bundle_path, "Study bundle")->required()->check(CLI::ExistingFile);
    render->add_option("--stimulus", stimulus_id, "Stimulus id")->required();
    render->add_option("-o,--output", output, "SVG file to write")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic study with planted ground truth");
    synth->add_option("spec", spec_path, "Synthetic study spec (JSON)")->required()->check(CLI::ExistingFile);
    synth->add_option("-o,--output", output, "Output directory")->required();

    auto* exp = app.add_subcommand("export", "Copy a bundle, its screenshots and UI assets into a directory");
    exp->add_option("bundle", bundle_path, "Study bundle")->required()->check(CLI::ExistingFile);
    exp->add_option("-o,--output", output, "Output directory")->required();
    exp->add_option("--ui-dir", ui_dir, "Directory of built review UI assets")->check(CLI::ExistingDirectory);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*validate) {
            const auto config = build_config(flags);
            const auto checks = validate_manifests(expand_manifests(manifests), config);
            bool ok = true;
            for (const auto& c : checks) {
                if (!c.ok) {
                    ok = false;
                    out << "FAIL " << c.manifest.generic_string() << ": " << c.error << '\n';
                    continue;
                }
                out << "OK   " << c.manifest.generic_string() << " (" << c.report.gaze_samples << " gaze samples)\n";
                for (const auto& line : c.report.describe()) out << "     " << line << '\n';
            }
            return ok ? kExitOk : kExitValidation;
        }
        if (*link) {
            const auto config = build_config(flags);
            const fs::path out_file(output);
            PipelineOptions opts;
            opts.skip_invalid = skip_invalid;
            opts.bundle_dir = out_file.has_parent_path() ? out_file.parent_path() : fs::path(".");
            const auto paths = expand_manifests(manifests);
            const StudyBundle bundle = run_pipeline(paths, config, opts);
            write_bundle(out_file, bundle);
            std::size_t links = 0;
            for (const auto& s : bundle.sessions) links += s.links.size();
            out << "linked " << bundle.sessions.size() << " session(s), " << links << " link record(s) -> "
                << out_file.generic_string() << '\n';
            for (const auto& s : bundle.skipped) out << "skipped " << s.manifest << ": " << s.error << '\n';
            return kExitOk;
        }
        if (*metrics) {
            out << format_report(read_bundle(bundle_path).report);
            return kExitOk;
        }
        if (*render) {
            const fs::path bundle_file(bundle_path);
            const StudyBundle bundle = read_bundle(bundle_file);
            const Stimulus* stim = bundle.find_stimulus(stimulus_id);
            if (!stim) throw UsageError("bundle has no stimulus '" + stimulus_id + "'");
            std::optional<std::string> href;
            if (!stim->screenshot.empty()) {
                const fs::path shot = fs::absolute(bundle_file.parent_path() / stim->screenshot).lexically_normal();
                const fs::path out_dir = fs::absolute(fs::path(output)).parent_path();
                href = shot.lexically_relative(out_dir).generic_string();
            }
            write_text_file(output, render_sentiment_map(bundle, stimulus_id, href));
            out << "wrote " << output << '\n';
            return kExitOk;
        }
        if (*synth) {
            const auto spec = synth::parse_synth_spec(read_text_file(spec_path), spec_path);
            const auto study = synth::generate_study(spec);
            const auto written = synth::write_study(study, output);
            out << "generated " << written.size() << " session(s) for " << spec.subjects << " subject(s) in " << output
                << " (manifest list: " << (fs::path(output) / "manifests.txt").generic_string() << ")\n";
            return kExitOk;
        }
        if (*exp) {
            const auto bundle = export_bundle(bundle_path, output, ui_dir);
            out << "exported " << bundle.sessions.size() << " session(s) to " << output << '\n';
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitUsage;
}

}  // namespace gazelink::cli
