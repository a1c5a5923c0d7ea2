#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "reviewlore/corpus/email.hpp"

namespace reviewlore::corpus {

enum class DiffLineKind { Context, Add, Remove };

struct DiffLine {
    DiffLineKind kind;
    std::string text;  // without the leading marker

    bool operator==(const DiffLine&) const = default;
};

struct DiffHunk {
    std::string file_path_old;
    std::string file_path_new;
    int old_start = 0;
    int old_len = 0;
    int new_start = 0;
    int new_len = 0;
    std::optional<std::string> section_heading;
    std::vector<DiffLine> lines;

    // Declared lengths agree with the observed line kinds.
    bool consistent() const noexcept;
    // The file the hunk applies to (new path unless the file was deleted).
    const std::string& path() const noexcept;

    bool operator==(const DiffHunk&) const = default;
};

struct SeriesIndex {
    int index = 0;
    int total = 0;

    bool operator==(const SeriesIndex&) const = default;
};

struct Patch {
    std::string message_id;
    std::string subject;
    Mailbox author;
    std::string commit_message;
    std::vector<DiffHunk> diff;
    std::optional<SeriesIndex> series_index;
    std::string body;  // full message body the patch was parsed from

    // Hunks re-rendered in unified format.
    std::string diff_text() const;
    std::vector<std::string> touched_files() const;
};

struct CoverLetter {
    EmailMessage message;
    SeriesIndex index;
};

using SeriesElement = std::variant<Patch, CoverLetter>;

struct PatchSeries {
    std::optional<CoverLetter> cover_letter;
    std::vector<Patch> patches;  // by series index when present

    // Cover letter id, else the first patch's id.
    std::string id() const;
};

struct PatchPair {
    Patch buggy;
    Patch fix;
    std::string label;
};

struct ParsedDiff {
    std::vector<DiffHunk> hunks;
    std::vector<std::string> diagnostics;  // skipped malformed hunks
    std::size_t first_marker = std::string_view::npos;  // offset of the first diff marker
};

ParsedDiff parse_unified_diff(std::string_view text);

// Parses "[PATCH v3 2/7]"-style tags.
std::optional<SeriesIndex> parse_series_index(std::string_view subject);

// Body up to the first "---" line or diff marker.
std::string commit_message_of(std::string_view body, std::size_t first_marker);

// A Patch for mail carrying at least one valid hunk, a CoverLetter for a
// hunk-free "0/N" message, nothing otherwise.
std::optional<SeriesElement> parse_patch(const EmailMessage& message, std::vector<std::string>* diagnostics = nullptr);

// Groups the patch mail among `messages` into one series.
PatchSeries assemble_series(std::span<const EmailMessage> messages);

} // namespace reviewlore::corpus
