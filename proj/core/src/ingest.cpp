#include "gazelink/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazelink/error.hpp"

namespace gazelink {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string_view> fields;
};

// Splits the text into data rows after checking the header. Blank lines are skipped.
std::vector<CsvRow> read_csv(std::string_view text, std::string_view source,
                             const std::vector<std::string_view>& header) {
    std::vector<CsvRow> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    if (text.starts_with("\xEF\xBB\xBF")) pos = 3;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (trim(raw).empty()) continue;
        auto fields = split_fields(raw);
        if (!header_seen) {
            if (fields != header) {
                std::string expected;
                for (std::size_t i = 0; i < header.size(); ++i) {
                    if (i) expected += ',';
                    expected += header[i];
                }
                throw ParseError(std::string(source), line_no, "expected header '" + expected + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != header.size()) {
            throw ParseError(std::string(source), line_no,
                             "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        }
        rows.push_back({line_no, std::move(fields)});
    }
    if (!header_seen) throw ParseError(std::string(source), 0, "missing header");
    return rows;
}

TimeMs parse_time(std::string_view field, std::string_view source, std::size_t line) {
    TimeMs value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(std::string(source), line, "invalid timestamp '" + std::string(field) + "'");
    }
    if (value < 0) throw ParseError(std::string(source), line, "negative timestamp");
    return value;
}

double parse_number(std::string_view field, std::string_view source, std::size_t line, std::string_view column) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw ParseError(std::string(source), line,
                         "invalid " + std::string(column) + " value '" + std::string(field) + "'");
    }
    return value;
}

bool parse_flag(std::string_view field, std::string_view source, std::size_t line) {
    if (field == "1" || field == "true") return true;
    if (field == "0" || field == "false") return false;
    throw ParseError(std::string(source), line, "invalid valid flag '" + std::string(field) + "'");
}

// Stable sort, then keep the last row of every run of equal timestamps.
template <typename Sample>
ParsedStream<Sample> sort_dedup(std::vector<Sample> samples) {
    std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });
    ParsedStream<Sample> out;
    out.samples.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() && samples[i + 1].t == samples[i].t) {
            ++out.duplicates;
            continue;
        }
        out.samples.push_back(samples[i]);
    }
    return out;
}

json parse_json(std::string_view text, std::string_view source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(source), 0, std::string("invalid JSON: ") + e.what());
    }
}

const json& require(const json& obj, const char* key, std::string_view source) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ParseError(std::string(source), 0, std::string("missing field '") + key + "'");
    }
    return obj.at(key);
}

double require_number(const json& obj, const char* key, std::string_view source) {
    const auto& v = require(obj, key, source);
    if (!v.is_number()) throw ParseError(std::string(source), 0, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::string require_string(const json& obj, const char* key, std::string_view source) {
    const auto& v = require(obj, key, source);
    if (!v.is_string()) throw ParseError(std::string(source), 0, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::string indexed_id(long long n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "u%04lld", n);
    return buf;
}

// Union of each speaker's turns, sorted.
std::map<std::string, std::vector<Interval>> turns_by_speaker(const std::vector<SpeakerTurn>& turns) {
    std::map<std::string, std::vector<Interval>> raw;
    for (const auto& t : turns) raw[t.speaker].push_back({t.start, t.end});
    for (auto& [speaker, spans] : raw) {
        std::sort(spans.begin(), spans.end(), [](Interval a, Interval b) { return a.start < b.start; });
        std::vector<Interval> merged;
        for (const auto& s : spans) {
            if (!merged.empty() && s.start <= merged.back().end) {
                merged.back().end = std::max(merged.back().end, s.end);
            } else {
                merged.push_back(s);
            }
        }
        spans = std::move(merged);
    }
    return raw;
}

}  // namespace

// ---------------------------------------------------------------------------

ParsedStream<GazeSample> parse_gaze_csv(std::string_view text, std::string_view source) {
    std::vector<GazeSample> samples;
    for (const auto& row : read_csv(text, source, {"t_ms", "x", "y", "valid"})) {
        samples.push_back({parse_time(row.fields[0], source, row.line),
                           parse_number(row.fields[1], source, row.line, "x"),
                           parse_number(row.fields[2], source, row.line, "y"),
                           parse_flag(row.fields[3], source, row.line)});
    }
    if (samples.empty()) throw ParseError(std::string(source), 0, "gaze stream is empty");
    return sort_dedup(std::move(samples));
}

ParsedStream<MouseSample> parse_mouse_csv(std::string_view text, std::string_view source) {
    std::vector<MouseSample> samples;
    for (const auto& row : read_csv(text, source, {"t_ms", "x", "y"})) {
        samples.push_back({parse_time(row.fields[0], source, row.line),
                           parse_number(row.fields[1], source, row.line, "x"),
                           parse_number(row.fields[2], source, row.line, "y")});
    }
    return sort_dedup(std::move(samples));
}

ParsedStream<ScrollState> parse_scroll_csv(std::string_view text, std::string_view source) {
    std::vector<ScrollState> states;
    if (!trim(text).empty()) {
        for (const auto& row : read_csv(text, source, {"t_ms", "offset_x", "offset_y"})) {
            ScrollState s{parse_time(row.fields[0], source, row.line),
                          parse_number(row.fields[1], source, row.line, "offset_x"),
                          parse_number(row.fields[2], source, row.line, "offset_y")};
            if (s.offset_x < 0 || s.offset_y < 0) throw ParseError(std::string(source), row.line, "negative scroll offset");
            states.push_back(s);
        }
    }
    if (states.empty()) return {{ScrollState{}}, 0};
    return sort_dedup(std::move(states));
}

ParsedStreams parse_streams(const fs::path& gaze_file, const fs::path& mouse_file,
                            const std::optional<fs::path>& scroll_file) {
    ParsedStreams out;
    auto gaze = parse_gaze_csv(read_text_file(gaze_file), gaze_file.string());
    auto mouse = parse_mouse_csv(read_text_file(mouse_file), mouse_file.string());
    auto scroll = scroll_file ? parse_scroll_csv(read_text_file(*scroll_file), scroll_file->string())
                              : parse_scroll_csv("", "");
    out.gaze = std::move(gaze.samples);
    out.mouse = std::move(mouse.samples);
    out.scroll = std::move(scroll.samples);
    out.duplicates = {gaze.duplicates, mouse.duplicates, scroll.duplicates};
    return out;
}

// ---------------------------------------------------------------------------

TimeMs seconds_to_ms(double seconds) noexcept {
    return static_cast<TimeMs>(std::floor(seconds * 1000.0 + 0.5));
}

std::vector<TranscriptSegment> parse_transcript(std::string_view json_text, std::string_view source) {
    const json doc = parse_json(json_text, source);
    const json* list = &doc;
    if (doc.is_object()) list = &require(doc, "segments", source);
    if (!list->is_array()) throw ParseError(std::string(source), 0, "transcript must be a list of segments");

    struct Raw {
        TranscriptSegment seg;
        bool has_id = false;
    };
    std::vector<Raw> raw;
    for (const auto& item : *list) {
        Raw r;
        r.seg.start = seconds_to_ms(require_number(item, "start", source));
        r.seg.end = seconds_to_ms(require_number(item, "end", source));
        r.seg.text = std::string(trim(require_string(item, "text", source)));
        if (item.contains("id")) {
            const auto& id = item.at("id");
            if (id.is_string()) {
                r.seg.id = id.get<std::string>();
                r.has_id = true;
            } else if (id.is_number_integer()) {
                r.seg.id = indexed_id(id.get<long long>());
                r.has_id = true;
            }
        }
        if (r.seg.start < 0) throw ParseError(std::string(source), 0, "segment starts before 0 s");
        if (r.seg.end <= r.seg.start) {
            throw ParseError(std::string(source), 0,
                             "segment [" + std::to_string(r.seg.start) + ", " + std::to_string(r.seg.end) +
                                 "] ms has end <= start");
        }
        if (r.seg.text.empty()) throw ParseError(std::string(source), 0, "segment with empty text");
        raw.push_back(std::move(r));
    }
    if (raw.empty()) throw ParseError(std::string(source), 0, "transcript has no segments");

    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.seg.start < b.seg.start; });
    std::vector<TranscriptSegment> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!raw[i].has_id) raw[i].seg.id = indexed_id(static_cast<long long>(i));
        if (!seen.insert(raw[i].seg.id).second) {
            throw ParseError(std::string(source), 0, "duplicate segment id '" + raw[i].seg.id + "'");
        }
        out.push_back(std::move(raw[i].seg));
    }
    return out;
}

std::vector<SpeakerTurn> parse_speaker_turns(std::string_view json_text, std::string_view source) {
    const json doc = parse_json(json_text, source);
    if (!doc.is_array()) throw ParseError(std::string(source), 0, "speaker file must be a list of turns");
    std::vector<SpeakerTurn> turns;
    for (const auto& item : doc) {
        SpeakerTurn t{seconds_to_ms(require_number(item, "start", source)),
                      seconds_to_ms(require_number(item, "end", source)), require_string(item, "speaker", source)};
        if (t.end <= t.start) throw ParseError(std::string(source), 0, "speaker turn with end <= start");
        turns.push_back(std::move(t));
    }
    std::stable_sort(turns.begin(), turns.end(), [](const SpeakerTurn& a, const SpeakerTurn& b) { return a.start < b.start; });
    return turns;
}

DiarizationResult apply_diarization(const std::vector<TranscriptSegment>& segments,
                                    const std::vector<SpeakerTurn>& turns, const std::string& tester_label) {
    const auto by_speaker = turns_by_speaker(turns);
    if (!by_speaker.contains(tester_label)) {
        throw ValidationError("tester label '" + tester_label + "' does not appear in the speaker turns");
    }

    DiarizationResult result;
    for (const auto& seg : segments) {
        const Interval span{seg.start, seg.end};
        TimeMs best = 0;
        TimeMs tester = 0;
        for (const auto& [speaker, spans] : by_speaker) {
            TimeMs covered = 0;
            for (const auto& s : spans) covered += interval_overlap(span, s);
            best = std::max(best, covered);
            if (speaker == tester_label) tester = covered;
        }
        if (best == 0) {
            ++result.dropped_uncovered;
            continue;
        }
        if (tester < best) {
            ++result.dropped_other_speaker;
            continue;
        }
        // The tester holds the maximum; count it as a tie if anyone else does too.
        for (const auto& [speaker, spans] : by_speaker) {
            if (speaker == tester_label) continue;
            TimeMs covered = 0;
            for (const auto& s : spans) covered += interval_overlap(span, s);
            if (covered == best) {
                ++result.tester_ties;
                break;
            }
        }
        Utterance u;
        u.id = seg.id;
        u.speaker = tester_label;
        u.start = seg.start;
        u.end = seg.end;
        u.text = seg.text;
        result.utterances.push_back(std::move(u));
    }
    return result;
}

// ---------------------------------------------------------------------------

Stimulus parse_aois(std::string_view json_text, std::string_view source) {
    const json doc = parse_json(json_text, source);
    Stimulus s;
    s.page_width = require_number(doc, "page_width", source);
    s.page_height = require_number(doc, "page_height", source);
    s.viewport_width = require_number(doc, "viewport_width", source);
    s.viewport_height = require_number(doc, "viewport_height", source);
    const auto& list = require(doc, "aois", source);
    if (!list.is_array()) throw ParseError(std::string(source), 0, "'aois' must be a list");
    for (const auto& item : list) {
        Aoi a;
        a.id = require_string(item, "id", source);
        a.label = item.contains("label") ? require_string(item, "label", source) : std::string{};
        a.rect = {require_number(item, "x", source), require_number(item, "y", source), require_number(item, "w", source),
                  require_number(item, "h", source)};
        s.aois.push_back(std::move(a));
    }
    try {
        validate_stimulus(s);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(source) + ": " + e.what());
    }
    return s;
}

void validate_stimulus(const Stimulus& s) {
    if (!(s.page_width > 0 && s.page_height > 0 && s.viewport_width > 0 && s.viewport_height > 0)) {
        throw ValidationError("page and viewport sizes must be positive");
    }
    if (s.page_height < s.viewport_height || s.page_width < s.viewport_width) {
        throw ValidationError("page must be at least as large as the viewport");
    }
    std::set<std::string, std::less<>> ids;
    for (const auto& a : s.aois) {
        if (a.id.empty()) throw ValidationError("AOI with empty id");
        if (!(a.rect.w > 0 && a.rect.h > 0)) throw ValidationError("AOI '" + a.id + "' has non-positive size");
        if (a.rect.x < 0 || a.rect.y < 0 || a.rect.x + a.rect.w > s.page_width || a.rect.y + a.rect.h > s.page_height) {
            throw ValidationError("AOI '" + a.id + "' lies outside the page bounds");
        }
        if (!ids.insert(a.id).second) throw ValidationError("duplicate AOI id '" + a.id + "'");
    }
}

Annotations parse_annotations(std::string_view json_text, std::string_view source) {
    const json doc = parse_json(json_text, source);
    const auto& list = require(doc, "utterances", source);
    if (!list.is_array()) throw ParseError(std::string(source), 0, "'utterances' must be a list");
    Annotations out;
    for (const auto& item : list) {
        const auto id = require_string(item, "id", source);
        AnnotationRecord rec;
        if (item.contains("sentiment")) {
            try {
                rec.sentiment = parse_sentiment(require_string(item, "sentiment", source));
            } catch (const ValidationError& e) {
                throw ParseError(std::string(source), 0, e.what());
            }
        }
        if (item.contains("mentioned_aois")) {
            const auto& m = item.at("mentioned_aois");
            if (!m.is_array()) throw ParseError(std::string(source), 0, "'mentioned_aois' must be a list");
            for (const auto& aoi : m) {
                if (!aoi.is_string()) throw ParseError(std::string(source), 0, "AOI ids must be strings");
                rec.mentioned_aois.insert(aoi.get<std::string>());
            }
        }
        if (item.contains("merge_with_previous")) {
            const auto& f = item.at("merge_with_previous");
            if (!f.is_boolean()) throw ParseError(std::string(source), 0, "'merge_with_previous' must be a boolean");
            rec.merge_with_previous = f.get<bool>();
        }
        if (!out.emplace(id, std::move(rec)).second) {
            throw ParseError(std::string(source), 0, "duplicate annotation for utterance '" + id + "'");
        }
    }
    return out;
}

std::vector<Utterance> apply_annotations(std::vector<Utterance> utterances, const Annotations& annotations,
                                         const Stimulus& stimulus) {
    for (const auto& [id, rec] : annotations) {
        const bool known = std::any_of(utterances.begin(), utterances.end(), [&](const Utterance& u) { return u.id == id; });
        if (!known) throw ValidationError("annotation references unknown utterance '" + id + "'");
        for (const auto& aoi : rec.mentioned_aois) {
            if (!stimulus.find_aoi(aoi)) {
                throw ValidationError("annotation for utterance '" + id + "' references unknown AOI '" + aoi + "'");
            }
        }
    }
    for (auto& u : utterances) {
        if (auto it = annotations.find(u.id); it != annotations.end()) {
            u.sentiment = it->second.sentiment;
            u.mentioned_aois = it->second.mentioned_aois;
        } else {
            u.sentiment = Sentiment::unlabeled;
            u.mentioned_aois.clear();
        }
    }
    return utterances;
}

std::vector<Utterance> merge_utterances(std::vector<Utterance> utterances, TimeMs max_gap_ms,
                                        const Annotations& annotations) {
    std::stable_sort(utterances.begin(), utterances.end(),
                     [](const Utterance& a, const Utterance& b) { return a.start < b.start; });
    auto flagged = [&](const std::string& id) {
        const auto it = annotations.find(id);
        return it != annotations.end() && it->second.merge_with_previous;
    };

    std::vector<Utterance> out;
    for (auto& u : utterances) {
        const bool flag = flagged(u.id);
        if (out.empty()) {
            if (flag) throw ValidationError("utterance '" + u.id + "' is flagged merge_with_previous but has no predecessor");
            out.push_back(std::move(u));
            continue;
        }
        auto& head = out.back();
        const bool same_speaker = head.speaker == u.speaker;
        const bool close = max_gap_ms > 0 && u.start - head.end <= max_gap_ms;
        if (same_speaker && (flag || close)) {
            head.end = std::max(head.end, u.end);
            head.text += ' ';
            head.text += u.text;
            head.mentioned_aois.insert(u.mentioned_aois.begin(), u.mentioned_aois.end());
            if (head.sentiment == Sentiment::unlabeled) head.sentiment = u.sentiment;
        } else {
            out.push_back(std::move(u));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

double ValidationReport::invalid_gaze_fraction() const noexcept {
    return gaze_samples == 0 ? 0.0 : static_cast<double>(invalid_gaze_samples) / static_cast<double>(gaze_samples);
}

bool ValidationReport::empty() const noexcept {
    return gaps.empty() && invalid_gaze_samples == 0 && clamped_utterances.empty() && dropped_out_of_range.empty() &&
           dropped_other_speaker == 0 && dropped_uncovered == 0 && tester_ties == 0 && duplicates.total() == 0;
}

std::vector<std::string> ValidationReport::describe() const {
    std::vector<std::string> lines;
    for (const auto& g : gaps) {
        lines.push_back(g.stream + " gap of " + std::to_string(g.to - g.from) + " ms at [" + std::to_string(g.from) +
                        ", " + std::to_string(g.to) + "]");
    }
    if (invalid_gaze_samples > 0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%zu of %zu gaze samples invalid (%.1f%%)", invalid_gaze_samples, gaze_samples,
                      100.0 * invalid_gaze_fraction());
        lines.emplace_back(buf);
    }
    for (const auto& id : clamped_utterances) lines.push_back("utterance " + id + " clamped to the stream range");
    for (const auto& id : dropped_out_of_range) lines.push_back("utterance " + id + " lies outside the stream range");
    if (dropped_other_speaker) lines.push_back(std::to_string(dropped_other_speaker) + " non-tester segments dropped");
    if (dropped_uncovered) lines.push_back(std::to_string(dropped_uncovered) + " segments without a speaker turn dropped");
    if (tester_ties) lines.push_back(std::to_string(tester_ties) + " segments assigned to the tester on a coverage tie");
    if (duplicates.gaze) lines.push_back(std::to_string(duplicates.gaze) + " duplicate gaze timestamps");
    if (duplicates.mouse) lines.push_back(std::to_string(duplicates.mouse) + " duplicate mouse timestamps");
    if (duplicates.scroll) lines.push_back(std::to_string(duplicates.scroll) + " duplicate scroll timestamps");
    return lines;
}

ValidationReport validate_session(const Session& session, const IngestStats& stats, TimeMs gap_threshold_ms) {
    ValidationReport r;
    auto scan = [&](const auto& stream, const char* name) {
        for (std::size_t i = 1; i < stream.size(); ++i) {
            if (stream[i].t - stream[i - 1].t > gap_threshold_ms) r.gaps.push_back({name, stream[i - 1].t, stream[i].t});
        }
    };
    scan(session.gaze, "gaze");
    scan(session.mouse, "mouse");
    r.gaze_samples = session.gaze.size();
    r.invalid_gaze_samples = static_cast<std::size_t>(
        std::count_if(session.gaze.begin(), session.gaze.end(), [](const GazeSample& g) { return !g.valid; }));
    r.clamped_utterances = stats.clamped_utterances;
    r.dropped_out_of_range = stats.dropped_out_of_range;
    r.dropped_other_speaker = stats.dropped_other_speaker;
    r.dropped_uncovered = stats.dropped_uncovered;
    r.tester_ties = stats.tester_ties;
    r.duplicates = stats.duplicates;
    return r;
}

std::vector<Utterance> clamp_utterances(std::vector<Utterance> utterances, Interval range, IngestStats& stats) {
    std::vector<Utterance> out;
    out.reserve(utterances.size());
    for (auto& u : utterances) {
        const TimeMs start = std::max(u.start, range.start);
        const TimeMs end = std::min(u.end, range.end);
        if (end <= start) {
            stats.dropped_out_of_range.push_back(u.id);
            continue;
        }
        if (start != u.start || end != u.end) stats.clamped_utterances.push_back(u.id);
        u.start = start;
        u.end = end;
        out.push_back(std::move(u));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string read_text_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Manifest read_manifest(const fs::path& manifest_file) {
    const auto source = manifest_file.string();
    const json doc = parse_json(read_text_file(manifest_file), source);
    const auto base = manifest_file.parent_path();
    auto path_of = [&](const char* key) { return base / fs::path(require_string(doc, key, source)); };
    auto optional_path = [&](const char* key) -> std::optional<fs::path> {
        if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
        return path_of(key);
    };

    Manifest m;
    m.subject_id = require_string(doc, "subject_id", source);
    m.stimulus_id = require_string(doc, "stimulus_id", source);
    m.tester_label = doc.contains("tester_label") ? require_string(doc, "tester_label", source) : "tester";
    m.screenshot = doc.contains("screenshot") ? path_of("screenshot") : fs::path{};
    m.gaze = path_of("gaze");
    m.mouse = path_of("mouse");
    m.scroll = optional_path("scroll");
    m.transcript = path_of("transcript");
    m.speakers = path_of("speakers");
    m.aois = path_of("aois");
    m.annotations = optional_path("annotations");
    return m;
}

LoadedSession load_session(const fs::path& manifest_file, const IngestOptions& options) {
    try {
        const Manifest m = read_manifest(manifest_file);

        Stimulus stimulus = parse_aois(read_text_file(m.aois), m.aois.string());
        stimulus.id = m.stimulus_id;
        stimulus.screenshot = m.screenshot.empty() ? std::string{} : m.screenshot.string();

        ParsedStreams streams = parse_streams(m.gaze, m.mouse, m.scroll);
        const double max_x = stimulus.page_width - stimulus.viewport_width;
        const double max_y = stimulus.page_height - stimulus.viewport_height;
        for (const auto& s : streams.scroll) {
            if (s.offset_x > max_x || s.offset_y > max_y) {
                throw ValidationError("scroll offset (" + std::to_string(s.offset_x) + ", " + std::to_string(s.offset_y) +
                                      ") at t=" + std::to_string(s.t) + " exceeds page size minus viewport size");
            }
        }

        const auto segments = parse_transcript(read_text_file(m.transcript), m.transcript.string());
        const auto turns = parse_speaker_turns(read_text_file(m.speakers), m.speakers.string());
        DiarizationResult diarized = apply_diarization(segments, turns, m.tester_label);

        Annotations annotations;
        if (m.annotations) annotations = parse_annotations(read_text_file(*m.annotations), m.annotations->string());
        auto utterances = apply_annotations(std::move(diarized.utterances), annotations, stimulus);
        utterances = merge_utterances(std::move(utterances), options.max_gap_ms, annotations);

        IngestStats stats;
        stats.duplicates = streams.duplicates;
        stats.dropped_other_speaker = diarized.dropped_other_speaker;
        stats.dropped_uncovered = diarized.dropped_uncovered;
        stats.tester_ties = diarized.tester_ties;

        Session session;
        session.subject_id = m.subject_id;
        session.stimulus_id = m.stimulus_id;
        session.gaze = std::move(streams.gaze);
        session.mouse = std::move(streams.mouse);
        session.scroll = std::move(streams.scroll);
        session.utterances = clamp_utterances(std::move(utterances), session.time_range(), stats);

        LoadedSession out;
        out.report = validate_session(session, stats, options.gap_report_ms);
        out.session = std::move(session);
        out.stimulus = std::move(stimulus);
        out.manifest = manifest_file;
        return out;
    } catch (const ParseError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ValidationError(manifest_file.string() + ": " + e.what());
    } catch (const Error& e) {
        throw Error(manifest_file.string() + ": " + e.what());
    }
}

}  // namespace gazelink
