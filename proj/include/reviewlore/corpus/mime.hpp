#pragma once

#include <map>
#include <string>
#include <string_view>

namespace reviewlore::corpus::mime {

std::string decode_quoted_printable(std::string_view in, bool header_mode = false);

// Throws reviewlore::Error on characters outside the base64 alphabet.
std::string decode_base64(std::string_view in);

std::string latin1_to_utf8(std::string_view in);

// Decodes RFC 2047 encoded-words ("=?utf-8?q?...?=").
std::string decode_header_words(std::string_view value);

struct ContentType {
    std::string type = "text";
    std::string subtype = "plain";
    std::map<std::string, std::string> params;  // lower-cased names
};

ContentType parse_content_type(std::string_view value);

// Applies the transfer encoding and converts known single-byte charsets.
std::string decode_part_body(std::string_view body, std::string_view transfer_encoding, std::string_view charset);

} // namespace reviewlore::corpus::mime
