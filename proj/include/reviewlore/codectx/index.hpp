#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "reviewlore/corpus/patch.hpp"

namespace reviewlore::codectx {

enum class SymbolKind { Function, Type, Macro };
std::string_view to_string(SymbolKind k) noexcept;
std::optional<SymbolKind> parse_symbol_kind(std::string_view s) noexcept;

struct Definition {
    std::string symbol;
    std::string path;  // relative to the source root, '/' separated
    SymbolKind kind = SymbolKind::Function;
    std::size_t begin_line = 0;  // 1-based, inclusive
    std::size_t end_line = 0;
    std::size_t begin_offset = 0;  // byte range of the definition
    std::size_t end_offset = 0;
    std::optional<std::size_t> comment_offset;  // start of the attached comment
    std::optional<std::string> leading_comment;
    std::set<std::string> body_identifiers;

    bool operator==(const Definition&) const = default;
};

// Definitions found in one file's text. `path` is only copied into results.
std::vector<Definition> scan_source(std::string_view text, const std::string& path);

class SymbolIndex {
public:
    std::filesystem::path root;
    std::string tree_digest;
    std::size_t files_scanned = 0;
    std::size_t files_skipped = 0;
    std::map<std::string, std::vector<Definition>> symbols;

    const std::vector<Definition>* find(std::string_view symbol) const;
    std::size_t definition_count() const;

    bool operator==(const SymbolIndex& o) const {
        return tree_digest == o.tree_digest && files_scanned == o.files_scanned &&
               files_skipped == o.files_skipped && symbols == o.symbols;
    }
};

// Digest over the relative paths and contents of every C source and header.
std::string tree_digest(const std::filesystem::path& source_root);

// Scans every *.c and *.h below `source_root`. Unreadable files are counted
// in files_skipped.
SymbolIndex build_index(const std::filesystem::path& source_root);

void save_index(const SymbolIndex& index, const std::filesystem::path& file);
SymbolIndex load_index(const std::filesystem::path& file, const std::filesystem::path& source_root);

// Reuses `cache_file` when its digest matches the tree, rebuilding otherwise.
SymbolIndex load_or_build_index(const std::filesystem::path& source_root, const std::filesystem::path& cache_file);

// Function names from hunk headings plus identifiers on added and removed
// lines, most frequent first, ties by first appearance.
std::vector<std::string> extract_symbols(const corpus::Patch& patch);

inline constexpr std::size_t kDefaultContextBudget = 24000;

struct CodeExcerpt {
    std::string symbol;
    std::string path;
    std::size_t begin_line = 0;
    std::string text;  // leading comment through end of definition, verbatim
    bool truncated = false;
};

struct ContextResult {
    std::vector<CodeExcerpt> excerpts;
    std::vector<std::string> misses;          // symbols with no definition
    std::vector<std::string> over_budget;     // symbols left out once the budget ran out
    std::size_t total_chars() const;
    bool truncated() const;
};

// Throws PreconditionError when budget is 0.
ContextResult fetch_context(const std::vector<std::string>& symbols, const SymbolIndex& index,
                            std::size_t budget = kDefaultContextBudget);

// Renders excerpts for a prompt.
std::string render_context(const ContextResult& ctx);

struct PathCut {
    std::vector<std::string> chain;
    std::string next;  // the callee not followed
    bool cycle = false;  // false: depth limit
};

struct CallPaths {
    std::vector<std::vector<std::string>> chains;
    std::vector<PathCut> cuts;
    bool limited = false;  // stopped at max_chains
};

// Chains follow references to indexed functions and macros. A chain ends at
// max_depth symbols, at a leaf, or where every callee is already on it.
CallPaths call_paths(const std::string& symbol, const SymbolIndex& index, std::size_t max_depth,
                     std::size_t max_chains = 256);

} // namespace reviewlore::codectx
