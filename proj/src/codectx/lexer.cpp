#include "reviewlore/codectx/lexer.hpp"

#include <algorithm>
#include <iterator>

namespace reviewlore::codectx {

namespace {

constexpr std::string_view kKeywords[] = {
    "NULL", "_Alignas", "_Alignof", "_Atomic", "_Bool", "_Generic", "_Noreturn", "_Static_assert",
    "asm", "auto", "bool", "break", "case", "char", "const", "continue", "default", "do", "double", "else", "enum",
    "extern", "false", "float", "for", "goto", "if", "inline", "int", "long", "register", "restrict", "return",
    "short", "signed", "sizeof", "static", "struct", "switch", "true", "typedef", "typeof", "union", "unsigned",
    "void", "volatile", "while"};

bool ident_start(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) noexcept { return ident_start(c) || (c >= '0' && c <= '9'); }

} // namespace

bool is_c_keyword(std::string_view word) noexcept {
    static_assert(std::is_sorted(std::begin(kKeywords), std::end(kKeywords)));
    return std::binary_search(std::begin(kKeywords), std::end(kKeywords), word);
}

void for_each_identifier(std::string_view code, const std::function<void(std::size_t, std::string_view)>& fn) {
    const std::size_t n = code.size();
    std::size_t i = 0;
    while (i < n) {
        const char c = code[i];
        if (c == '/' && i + 1 < n && code[i + 1] == '*') {
            const auto end = code.find("*/", i + 2);
            i = end == std::string_view::npos ? n : end + 2;
        } else if (c == '/' && i + 1 < n && code[i + 1] == '/') {
            const auto end = code.find('\n', i);
            i = end == std::string_view::npos ? n : end;
        } else if (c == '"' || c == '\'') {
            ++i;
            while (i < n && code[i] != c && code[i] != '\n') i += code[i] == '\\' ? 2 : 1;
            ++i;
        } else if (ident_start(c)) {
            const std::size_t start = i;
            while (i < n && ident_char(code[i])) ++i;
            fn(start, code.substr(start, i - start));
        } else if (c >= '0' && c <= '9') {
            while (i < n && (ident_char(code[i]) || code[i] == '.')) ++i;
        } else {
            ++i;
        }
    }
}

} // namespace reviewlore::codectx
