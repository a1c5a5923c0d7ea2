#include "reviewlore/corpus/email.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <set>

#include "reviewlore/common/digest.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/gzip.hpp"
#include "reviewlore/common/text.hpp"
#include "reviewlore/corpus/mime.hpp"

namespace reviewlore::corpus {

namespace {

using HeaderMap = std::map<std::string, std::vector<std::string>>;

struct SplitMessage {
    HeaderMap headers;
    std::string_view body;
};

// Unfolds the header block; the body starts after the first empty line.
SplitMessage split_headers(std::string_view raw) {
    SplitMessage out;
    std::size_t pos = 0;
    std::string name;
    std::string value;
    auto flush = [&] {
        if (!name.empty()) out.headers[text::to_lower(name)].push_back(std::string(text::trim(value)));
        name.clear();
        value.clear();
    };
    while (pos < raw.size()) {
        std::size_t nl = raw.find('\n', pos);
        std::size_t end = nl == std::string_view::npos ? raw.size() : nl;
        std::string_view line = raw.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = nl == std::string_view::npos ? raw.size() : nl + 1;
        if (line.empty()) {
            flush();
            out.body = raw.substr(pos);
            return out;
        }
        if (line.front() == ' ' || line.front() == '\t') {
            if (!name.empty()) {
                value.push_back(' ');
                value.append(text::trim(line));
            }
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos || colon == 0) continue;  // junk header line
        flush();
        name = std::string(text::trim(line.substr(0, colon)));
        value = std::string(line.substr(colon + 1));
    }
    flush();
    out.body = {};
    return out;
}

const std::string* first_header(const HeaderMap& h, const std::string& name) {
    auto it = h.find(name);
    if (it == h.end() || it->second.empty()) return nullptr;
    return &it->second.front();
}

bool is_text_part(const mime::ContentType& ct) {
    return ct.type == "text" && (ct.subtype == "plain" || ct.subtype == "x-patch" || ct.subtype == "x-diff" ||
                                 ct.subtype.empty());
}

// Collects decoded text/plain (and text/x-patch) parts, recursing through
// multiparts. Non-text parts are ignored.
void collect_text(const HeaderMap& headers, std::string_view body, std::string& out, int depth) {
    if (depth > 8) throw Error("MIME nesting too deep");
    const std::string* ct_value = first_header(headers, "content-type");
    const mime::ContentType ct = ct_value ? mime::parse_content_type(*ct_value) : mime::ContentType{};
    const std::string* cte = first_header(headers, "content-transfer-encoding");

    if (ct.type == "multipart") {
        auto b = ct.params.find("boundary");
        if (b == ct.params.end() || b->second.empty()) throw Error("multipart without boundary");
        const std::string delim = "--" + b->second;
        std::vector<std::string_view> parts;
        std::size_t part_start = std::string_view::npos;
        std::size_t pos = 0;
        while (pos <= body.size()) {
            std::size_t nl = body.find('\n', pos);
            std::size_t end = nl == std::string_view::npos ? body.size() : nl;
            std::string_view line = body.substr(pos, end - pos);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (line.starts_with(delim)) {
                if (part_start != std::string_view::npos) parts.push_back(body.substr(part_start, pos - part_start));
                const bool closing = line.substr(delim.size()).starts_with("--");
                part_start = closing ? std::string_view::npos : (nl == std::string_view::npos ? body.size() : nl + 1);
                if (closing) break;
            }
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
        if (part_start != std::string_view::npos && part_start < body.size())
            parts.push_back(body.substr(part_start));

        // Prefer text parts; html alternatives are dropped.
        for (auto part : parts) {
            auto sp = split_headers(part);
            collect_text(sp.headers, sp.body, out, depth + 1);
        }
        return;
    }
    if (!is_text_part(ct)) return;
    auto cs = ct.params.find("charset");
    std::string decoded =
        mime::decode_part_body(body, cte ? *cte : std::string{}, cs == ct.params.end() ? std::string{} : cs->second);
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
    out.append(decoded);
}

std::optional<int> month_index(std::string_view m) {
    static constexpr std::array<std::string_view, 12> kMonths{"jan", "feb", "mar", "apr", "may", "jun",
                                                              "jul", "aug", "sep", "oct", "nov", "dec"};
    const std::string lm = text::to_lower(m.substr(0, 3));
    for (std::size_t i = 0; i < kMonths.size(); ++i)
        if (lm == kMonths[i]) return static_cast<int>(i) + 1;
    return std::nullopt;
}

std::optional<int> to_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

std::optional<std::int64_t> make_epoch(int y, int mo, int d, int h, int mi, int s) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
    return duration_cast<seconds>(sys_days{ymd}.time_since_epoch()).count() + h * 3600 + mi * 60 + s;
}

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::optional<std::int64_t> parse_hms(std::string_view hms, int& h, int& mi, int& s) {
    const auto parts = text::split(hms, ':');
    if (parts.size() < 2 || parts.size() > 3) return std::nullopt;
    auto a = to_int(parts[0]), b = to_int(parts[1]);
    auto c = parts.size() == 3 ? to_int(parts[2]) : std::optional<int>(0);
    if (!a || !b || !c) return std::nullopt;
    h = *a;
    mi = *b;
    s = *c;
    return 0;
}

// "From sender Mon Apr  1 10:00:00 2025" separator lines (asctime, UTC).
std::optional<std::int64_t> parse_from_line_date(std::string_view line) {
    auto t = tokens(line);
    if (t.size() < 7) return std::nullopt;
    auto mo = month_index(t[3]);
    auto d = to_int(t[4]);
    auto y = to_int(t[6]);
    int h = 0, mi = 0, s = 0;
    if (!mo || !d || !y || !parse_hms(t[5], h, mi, s)) return std::nullopt;
    return make_epoch(*y, *mo, *d, h, mi, s);
}

} // namespace

std::string Mailbox::display() const {
    return name.empty() ? address : name + " <" + address + ">";
}

std::optional<std::int64_t> parse_rfc5322_date(std::string_view value) {
    // Drop trailing comments such as "(PST)".
    std::string v(value);
    if (auto p = v.find('('); p != std::string::npos) v.resize(p);
    auto t = tokens(v);
    if (!t.empty() && t[0].size() >= 3 && !to_int(t[0])) t.erase(t.begin());  // weekday
    if (t.size() < 4) return std::nullopt;
    auto d = to_int(t[0]);
    auto mo = month_index(t[1]);
    auto y = to_int(t[2]);
    int h = 0, mi = 0, s = 0;
    if (!d || !mo || !y || !parse_hms(t[3], h, mi, s)) return std::nullopt;
    int year = *y;
    if (t[2].size() == 2) year += year < 50 ? 2000 : 1900;
    auto base = make_epoch(year, *mo, *d, h, mi, s);
    if (!base) return std::nullopt;

    std::int64_t offset = 0;
    if (t.size() >= 5) {
        std::string_view z = t[4];
        if ((z.front() == '+' || z.front() == '-') && z.size() == 5) {
            auto hh = to_int(z.substr(1, 2));
            auto mm = to_int(z.substr(3, 2));
            if (hh && mm) offset = (z.front() == '+' ? 1 : -1) * (*hh * 3600 + *mm * 60);
        } else {
            static const std::map<std::string, int> kZones{{"ut", 0},   {"utc", 0},  {"gmt", 0},  {"z", 0},
                                                           {"est", -5}, {"edt", -4}, {"cst", -6}, {"cdt", -5},
                                                           {"mst", -7}, {"mdt", -6}, {"pst", -8}, {"pdt", -7}};
            auto it = kZones.find(text::to_lower(z));
            if (it != kZones.end()) offset = it->second * 3600;
        }
    }
    return *base - offset;
}

Mailbox parse_mailbox(std::string_view value) {
    Mailbox mb;
    const std::string decoded = mime::decode_header_words(text::trim(value));
    std::string_view v = decoded;
    const auto lt = v.rfind('<');
    const auto gt = v.rfind('>');
    if (lt != std::string_view::npos && gt != std::string_view::npos && gt > lt) {
        mb.address = std::string(text::trim(v.substr(lt + 1, gt - lt - 1)));
        std::string_view name = text::trim(v.substr(0, lt));
        if (name.size() >= 2 && name.front() == '"' && name.back() == '"') name = name.substr(1, name.size() - 2);
        mb.name = std::string(text::trim(name));
    } else if (auto paren = v.find('('); paren != std::string_view::npos && v.back() == ')') {
        mb.address = std::string(text::trim(v.substr(0, paren)));
        mb.name = std::string(text::trim(v.substr(paren + 1, v.size() - paren - 2)));
    } else {
        mb.address = std::string(text::trim(v));
    }
    return mb;
}

std::vector<std::string> parse_message_ids(std::string_view value) {
    std::vector<std::string> ids;
    std::size_t pos = 0;
    while (true) {
        const auto lt = value.find('<', pos);
        if (lt == std::string_view::npos) break;
        const auto gt = value.find('>', lt + 1);
        if (gt == std::string_view::npos) break;
        std::string id(text::trim(value.substr(lt + 1, gt - lt - 1)));
        if (!id.empty()) ids.push_back(std::move(id));
        pos = gt + 1;
    }
    if (ids.empty()) {
        // Some mailers omit the brackets.
        std::string_view bare = text::trim(value);
        if (!bare.empty() && bare.find(' ') == std::string_view::npos && bare.find('@') != std::string_view::npos)
            ids.emplace_back(bare);
    }
    return ids;
}

std::string synthetic_message_id(std::string_view raw_message) {
    return "synthetic." + sha256_hex(raw_message).substr(0, 32) + "@reviewlore.invalid";
}

EmailMessage parse_message(std::string_view raw, std::vector<MboxDiagnostic>& diagnostics, std::size_t offset,
                           std::optional<std::int64_t> fallback_date) {
    auto split = split_headers(raw);
    if (split.headers.empty()) throw Error("message has no headers");

    EmailMessage m;
    m.raw_headers = split.headers;

    if (const auto* id = first_header(split.headers, "message-id")) {
        auto ids = parse_message_ids(*id);
        if (!ids.empty()) m.message_id = ids.front();
    }
    if (m.message_id.empty()) {
        m.message_id = synthetic_message_id(raw);
        m.synthetic_id = true;
        diagnostics.push_back({offset, m.message_id, "missing Message-ID; assigned synthetic id"});
    }
    if (const auto* irt = first_header(split.headers, "in-reply-to")) {
        auto ids = parse_message_ids(*irt);
        if (!ids.empty()) m.in_reply_to = ids.front();
    }
    if (const auto* refs = first_header(split.headers, "references")) m.references = parse_message_ids(*refs);
    if (m.in_reply_to && !m.references.empty() && m.references.back() != *m.in_reply_to)
        diagnostics.push_back({offset, m.message_id, "References does not end with In-Reply-To"});

    if (const auto* from = first_header(split.headers, "from")) m.author = parse_mailbox(*from);
    if (const auto* subj = first_header(split.headers, "subject"))
        m.subject = text::normalize_whitespace(mime::decode_header_words(*subj));

    std::optional<std::int64_t> date;
    if (const auto* d = first_header(split.headers, "date")) date = parse_rfc5322_date(*d);
    if (!date) {
        date = fallback_date;
        diagnostics.push_back({offset, m.message_id, "missing or unparseable Date header"});
    }
    m.date = date.value_or(0);

    std::string body;
    collect_text(split.headers, split.body, body, 0);
    m.body = text::normalize_newlines(body);
    return m;
}

MboxParseResult parse_mbox(std::string_view archive) {
    std::string inflated;
    if (looks_gzipped(archive)) {
        inflated = gunzip(archive);
        archive = inflated;
    }

    MboxParseResult result;
    std::size_t pos = 0;
    // Leading blank lines are tolerated.
    while (pos < archive.size() && (archive[pos] == '\n' || archive[pos] == '\r')) ++pos;
    if (pos == archive.size()) return result;
    if (!archive.substr(pos).starts_with("From ")) throw MboxFramingError(pos, "archive does not start with a \"From \" line");

    struct Frame {
        std::size_t offset;
        std::string_view from_line;
        std::string content;
    };
    std::vector<Frame> frames;
    bool prev_blank = true;
    while (pos < archive.size()) {
        const std::size_t nl = archive.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? archive.size() : nl;
        std::string_view line = archive.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (line.starts_with("From ") && prev_blank) {
            if (!frames.empty() && frames.back().content.ends_with("\n\n")) frames.back().content.pop_back();
            frames.push_back({pos, line, {}});
        } else {
            std::string_view content_line = line;
            // mboxrd: one level of ">From " quoting is removed.
            std::size_t q = 0;
            while (q < content_line.size() && content_line[q] == '>') ++q;
            if (q > 0 && content_line.substr(q).starts_with("From ")) content_line.remove_prefix(1);
            frames.back().content.append(content_line);
            frames.back().content.push_back('\n');
        }
        prev_blank = line.empty();
        pos = nl == std::string_view::npos ? archive.size() : nl + 1;
    }
    if (!frames.empty() && frames.back().content.ends_with("\n\n")) frames.back().content.pop_back();

    std::set<std::string> seen;
    for (const auto& f : frames) {
        try {
            EmailMessage m = parse_message(f.content, result.diagnostics, f.offset, parse_from_line_date(f.from_line));
            if (!seen.insert(m.message_id).second) {
                result.diagnostics.push_back({f.offset, m.message_id, "duplicate Message-ID skipped"});
                continue;
            }
            result.messages.push_back(std::move(m));
        } catch (const Error& e) {
            result.diagnostics.push_back({f.offset, {}, std::string("message skipped: ") + e.what()});
        }
    }
    return result;
}

} // namespace reviewlore::corpus
