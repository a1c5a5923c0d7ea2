#pragma once

#include <string>
#include <string_view>

namespace reviewlore {

bool looks_gzipped(std::string_view bytes) noexcept;

// Inflates a gzip stream; throws reviewlore::Error on corrupt input.
std::string gunzip(std::string_view bytes);

} // namespace reviewlore

namespace reviewlore {

std::string gzip_compress(std::string_view bytes);

} // namespace reviewlore
