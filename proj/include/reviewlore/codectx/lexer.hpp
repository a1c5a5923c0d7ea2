#pragma once

#include <functional>
#include <string_view>

namespace reviewlore::codectx {

// C keywords and builtin type names; never reported as symbols.
bool is_c_keyword(std::string_view word) noexcept;

// Calls `fn(offset, identifier)` for every identifier in `code`, skipping
// comments, string and character literals, and numbers.
void for_each_identifier(std::string_view code, const std::function<void(std::size_t, std::string_view)>& fn);

} // namespace reviewlore::codectx
