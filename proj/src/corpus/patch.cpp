#include "reviewlore/corpus/patch.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "reviewlore/common/text.hpp"

namespace reviewlore::corpus {

namespace {

struct Line {
    std::string_view text;
    std::size_t offset;
};

std::vector<Line> lines_with_offsets(std::string_view s) {
    std::vector<Line> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t nl = s.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? s.size() : nl;
        std::string_view line = s.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back({line, pos});
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

std::string strip_path(std::string_view p) {
    p = text::trim(p);
    if (auto tab = p.find('\t'); tab != std::string_view::npos) p = p.substr(0, tab);
    if (p == "/dev/null") return std::string(p);
    if (p.starts_with("a/") || p.starts_with("b/")) p.remove_prefix(2);
    return std::string(p);
}

bool read_int(std::string_view& s, int& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr == begin) return false;
    s.remove_prefix(static_cast<std::size_t>(ptr - begin));
    return true;
}

// "@@ -a[,b] +c[,d] @@[ heading]"
bool parse_hunk_header(std::string_view line, DiffHunk& h) {
    if (!line.starts_with("@@ -")) return false;
    std::string_view s = line.substr(4);
    if (!read_int(s, h.old_start)) return false;
    h.old_len = 1;
    if (s.starts_with(",")) {
        s.remove_prefix(1);
        if (!read_int(s, h.old_len)) return false;
    }
    if (!s.starts_with(" +")) return false;
    s.remove_prefix(2);
    if (!read_int(s, h.new_start)) return false;
    h.new_len = 1;
    if (s.starts_with(",")) {
        s.remove_prefix(1);
        if (!read_int(s, h.new_len)) return false;
    }
    if (!s.starts_with(" @@")) return false;
    s.remove_prefix(3);
    if (h.old_len < 0 || h.new_len < 0) return false;
    const std::string_view heading = text::trim(s);
    if (!heading.empty()) h.section_heading = std::string(heading);
    return true;
}

} // namespace

bool DiffHunk::consistent() const noexcept {
    int old_seen = 0, new_seen = 0;
    for (const auto& l : lines) {
        if (l.kind != DiffLineKind::Add) ++old_seen;
        if (l.kind != DiffLineKind::Remove) ++new_seen;
    }
    return old_seen == old_len && new_seen == new_len;
}

const std::string& DiffHunk::path() const noexcept {
    return file_path_new == "/dev/null" ? file_path_old : file_path_new;
}

ParsedDiff parse_unified_diff(std::string_view text) {
    ParsedDiff out;
    const auto lines = lines_with_offsets(text);
    std::string old_path, new_path;
    bool have_paths = false;

    auto mark = [&](std::size_t offset) { out.first_marker = std::min(out.first_marker, offset); };

    std::size_t i = 0;
    while (i < lines.size()) {
        const std::string_view line = lines[i].text;
        if (line.starts_with("diff --git ")) {
            mark(lines[i].offset);
            // Provisional paths; the ---/+++ pair overrides them.
            const auto rest = line.substr(11);
            const auto sp = rest.find(" b/");
            if (sp != std::string_view::npos) {
                old_path = strip_path(rest.substr(0, sp));
                new_path = strip_path(rest.substr(sp + 1));
                have_paths = true;
            }
            ++i;
            continue;
        }
        if (line.starts_with("--- ") && i + 1 < lines.size() && lines[i + 1].text.starts_with("+++ ")) {
            mark(lines[i].offset);
            old_path = strip_path(line.substr(4));
            new_path = strip_path(lines[i + 1].text.substr(4));
            have_paths = true;
            i += 2;
            continue;
        }
        if (!line.starts_with("@@ ")) {
            ++i;
            continue;
        }

        mark(lines[i].offset);
        DiffHunk h;
        if (!parse_hunk_header(line, h)) {
            out.diagnostics.push_back("malformed hunk header skipped: " + std::string(line));
            ++i;
            continue;
        }
        ++i;
        int old_left = h.old_len, new_left = h.new_len;
        bool broken = false;
        while ((old_left > 0 || new_left > 0) && i < lines.size()) {
            const std::string_view l = lines[i].text;
            const char marker = l.empty() ? ' ' : l.front();
            const std::string_view body = l.empty() ? l : l.substr(1);
            if (marker == '\\') {
                ++i;
                continue;
            }
            if (marker == ' ' && old_left > 0 && new_left > 0) {
                h.lines.push_back({DiffLineKind::Context, std::string(body)});
                --old_left;
                --new_left;
            } else if (marker == '-' && old_left > 0) {
                h.lines.push_back({DiffLineKind::Remove, std::string(body)});
                --old_left;
            } else if (marker == '+' && new_left > 0) {
                h.lines.push_back({DiffLineKind::Add, std::string(body)});
                --new_left;
            } else {
                broken = true;
                break;
            }
            ++i;
        }
        if (broken || old_left > 0 || new_left > 0) {
            out.diagnostics.push_back("hunk at @@ -" + std::to_string(h.old_start) + " does not match its declared lengths; skipped");
            continue;
        }
        while (i < lines.size() && lines[i].text.starts_with("\\")) ++i;
        if (!have_paths) {
            out.diagnostics.push_back("hunk without file headers skipped");
            continue;
        }
        h.file_path_old = old_path;
        h.file_path_new = new_path;
        out.hunks.push_back(std::move(h));
    }
    return out;
}

std::optional<SeriesIndex> parse_series_index(std::string_view subject) {
    std::size_t pos = 0;
    while (true) {
        const auto open = subject.find('[', pos);
        if (open == std::string_view::npos) return std::nullopt;
        const auto close = subject.find(']', open + 1);
        if (close == std::string_view::npos) return std::nullopt;
        const std::string_view tag = subject.substr(open + 1, close - open - 1);
        for (const auto& tok : text::split(tag, ' ')) {
            const auto slash = tok.find('/');
            if (slash == std::string::npos || slash == 0 || slash + 1 == tok.size()) continue;
            std::string_view a(tok.data(), slash), b(tok.data() + slash + 1, tok.size() - slash - 1);
            SeriesIndex si;
            if (read_int(a, si.index) && a.empty() && read_int(b, si.total) && b.empty() && si.total > 0 &&
                si.index <= si.total)
                return si;
        }
        pos = close + 1;
    }
}

std::string commit_message_of(std::string_view body, std::size_t first_marker) {
    std::size_t cut = std::min(first_marker, body.size());
    for (const auto& l : lines_with_offsets(body.substr(0, cut))) {
        if (text::trim(l.text) == "---" && l.text.starts_with("---")) {
            cut = l.offset;
            break;
        }
    }
    return std::string(text::trim(body.substr(0, cut)));
}

std::string Patch::diff_text() const {
    std::string out;
    const DiffHunk* prev = nullptr;
    for (const auto& h : diff) {
        if (!prev || prev->file_path_old != h.file_path_old || prev->file_path_new != h.file_path_new) {
            out += "--- " + (h.file_path_old == "/dev/null" ? h.file_path_old : "a/" + h.file_path_old) + "\n";
            out += "+++ " + (h.file_path_new == "/dev/null" ? h.file_path_new : "b/" + h.file_path_new) + "\n";
        }
        out += "@@ -" + std::to_string(h.old_start) + "," + std::to_string(h.old_len) + " +" +
               std::to_string(h.new_start) + "," + std::to_string(h.new_len) + " @@";
        if (h.section_heading) out += " " + *h.section_heading;
        out += "\n";
        for (const auto& l : h.lines) {
            out.push_back(l.kind == DiffLineKind::Add ? '+' : l.kind == DiffLineKind::Remove ? '-' : ' ');
            out += l.text;
            out.push_back('\n');
        }
        prev = &h;
    }
    return out;
}

std::vector<std::string> Patch::touched_files() const {
    std::vector<std::string> files;
    for (const auto& h : diff)
        if (std::find(files.begin(), files.end(), h.path()) == files.end()) files.push_back(h.path());
    return files;
}

std::string PatchSeries::id() const {
    if (cover_letter) return cover_letter->message.message_id;
    return patches.empty() ? std::string{} : patches.front().message_id;
}

std::optional<SeriesElement> parse_patch(const EmailMessage& message, std::vector<std::string>* diagnostics) {
    ParsedDiff parsed = parse_unified_diff(message.body);
    if (diagnostics) diagnostics->insert(diagnostics->end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
    const auto index = parse_series_index(message.subject);

    if (!parsed.hunks.empty()) {
        Patch p;
        p.message_id = message.message_id;
        p.subject = message.subject;
        p.author = message.author;
        p.commit_message = commit_message_of(message.body, parsed.first_marker);
        p.diff = std::move(parsed.hunks);
        p.series_index = index;
        p.body = message.body;
        return SeriesElement{std::move(p)};
    }
    if (index && index->index == 0) return SeriesElement{CoverLetter{message, *index}};
    return std::nullopt;
}

PatchSeries assemble_series(std::span<const EmailMessage> messages) {
    PatchSeries series;
    for (const auto& m : messages) {
        auto el = parse_patch(m);
        if (!el) continue;
        if (auto* cl = std::get_if<CoverLetter>(&*el)) {
            if (!series.cover_letter) series.cover_letter = std::move(*cl);
        } else {
            series.patches.push_back(std::move(std::get<Patch>(*el)));
        }
    }
    std::stable_sort(series.patches.begin(), series.patches.end(), [](const Patch& a, const Patch& b) {
        const int ia = a.series_index ? a.series_index->index : std::numeric_limits<int>::max();
        const int ib = b.series_index ? b.series_index->index : std::numeric_limits<int>::max();
        return ia < ib;
    });
    return series;
}

} // namespace reviewlore::corpus
