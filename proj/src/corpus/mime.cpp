#include "reviewlore/corpus/mime.hpp"

#include <cctype>

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::corpus::mime {

namespace {

int hex_value(char c) noexcept {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

bool is_latin1_charset(std::string_view cs) {
    return text::iequals(cs, "iso-8859-1") || text::iequals(cs, "latin1") || text::iequals(cs, "iso-8859-15") ||
           text::iequals(cs, "windows-1252") || text::iequals(cs, "cp1252");
}

} // namespace

std::string decode_quoted_printable(std::string_view in, bool header_mode) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        const char c = in[i];
        if (header_mode && c == '_') {
            out.push_back(' ');
        } else if (c == '=') {
            if (i + 1 < in.size() && (in[i + 1] == '\n' || in[i + 1] == '\r')) {
                // soft line break
                ++i;
                if (in[i] == '\r' && i + 1 < in.size() && in[i + 1] == '\n') ++i;
            } else if (i + 2 < in.size() && hex_value(in[i + 1]) >= 0 && hex_value(in[i + 2]) >= 0) {
                out.push_back(static_cast<char>(hex_value(in[i + 1]) * 16 + hex_value(in[i + 2])));
                i += 2;
            } else {
                out.push_back(c);
            }
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string decode_base64(std::string_view in) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::string out;
    unsigned int acc = 0;
    int bits = 0;
    for (char c : in) {
        if (c == '=') break;
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        const int v = value(c);
        if (v < 0) throw Error(std::string("invalid base64 character '") + c + "'");
        acc = (acc << 6) | static_cast<unsigned int>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xff));
        }
    }
    return out;
}

std::string latin1_to_utf8(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (unsigned char c : in) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

std::string decode_header_words(std::string_view value) {
    std::string out;
    std::size_t pos = 0;
    bool last_was_word = false;
    while (pos < value.size()) {
        const std::size_t start = value.find("=?", pos);
        if (start == std::string_view::npos) {
            out.append(value.substr(pos));
            break;
        }
        // =?charset?enc?text?=
        const std::size_t q1 = value.find('?', start + 2);
        const std::size_t q2 = q1 == std::string_view::npos ? q1 : value.find('?', q1 + 1);
        const std::size_t end = q2 == std::string_view::npos ? q2 : value.find("?=", q2 + 1);
        if (end == std::string_view::npos || q2 != q1 + 2) {
            out.append(value.substr(pos));
            break;
        }
        const std::string_view between = value.substr(pos, start - pos);
        // Whitespace between adjacent encoded words is dropped.
        if (!(last_was_word && text::trim(between).empty())) out.append(between);

        const std::string_view charset = value.substr(start + 2, q1 - start - 2);
        const char enc = static_cast<char>(std::tolower(static_cast<unsigned char>(value[q1 + 1])));
        const std::string_view payload = value.substr(q2 + 1, end - q2 - 1);
        std::string decoded;
        try {
            decoded = enc == 'b' ? decode_base64(payload) : decode_quoted_printable(payload, true);
        } catch (const Error&) {
            decoded = std::string(value.substr(start, end + 2 - start));
        }
        out.append(is_latin1_charset(charset) ? latin1_to_utf8(decoded) : decoded);
        pos = end + 2;
        last_was_word = true;
    }
    return out;
}

ContentType parse_content_type(std::string_view value) {
    ContentType ct;
    const auto parts = text::split(value, ';');
    if (parts.empty()) return ct;
    const std::string mime = text::to_lower(text::trim(parts[0]));
    const auto slash = mime.find('/');
    if (slash != std::string::npos) {
        ct.type = mime.substr(0, slash);
        ct.subtype = mime.substr(slash + 1);
    } else if (!mime.empty()) {
        ct.type = mime;
        ct.subtype.clear();
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const std::string_view p = text::trim(parts[i]);
        const auto eq = p.find('=');
        if (eq == std::string_view::npos) continue;
        std::string key = text::to_lower(text::trim(p.substr(0, eq)));
        std::string_view val = text::trim(p.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
        ct.params[key] = std::string(val);
    }
    return ct;
}

std::string decode_part_body(std::string_view body, std::string_view transfer_encoding, std::string_view charset) {
    std::string decoded;
    const std::string enc = text::to_lower(text::trim(transfer_encoding));
    if (enc == "quoted-printable") decoded = decode_quoted_printable(body);
    else if (enc == "base64") decoded = decode_base64(body);
    else decoded = std::string(body);

    if (is_latin1_charset(charset)) return latin1_to_utf8(decoded);
    return decoded;
}

} // namespace reviewlore::corpus::mime
