#include "reviewlore/codectx/index.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "reviewlore/codectx/lexer.hpp"
#include "reviewlore/common/digest.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::codectx {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t npos = std::string_view::npos;

bool ident_start(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) noexcept { return ident_start(c) || (c >= '0' && c <= '9'); }

bool is_attribute_word(std::string_view w) noexcept {
    return w == "__attribute__" || w == "__attribute" || w == "__declspec" || w == "alignas" || w == "_Alignas" ||
           w == "__aligned" || w == "__section" || w == "__printf" || w == "__acquires" || w == "__releases" ||
           w == "__must_hold" || w == "typeof" || w == "__typeof__";
}

bool only_space(std::string_view s) noexcept {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

struct Token {
    enum Kind { Ident, Punct, Other } kind;
    std::string_view text;
    std::size_t offset;
};

class LineMap {
public:
    explicit LineMap(std::string_view text) {
        starts_.push_back(0);
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n') starts_.push_back(i + 1);
    }
    std::size_t line_of(std::size_t offset) const {
        return static_cast<std::size_t>(std::upper_bound(starts_.begin(), starts_.end(), offset) - starts_.begin());
    }

private:
    std::vector<std::size_t> starts_;
};

enum class OpenKind { None, Function, Type, Initializer, Opaque };

class Scanner {
public:
    Scanner(std::string_view text, const std::string& path) : text_(text), path_(path), lines_(text) {}

    std::vector<Definition> run() {
        const std::size_t n = text_.size();
        std::size_t i = 0;
        bool line_start = true;
        while (i < n) {
            const char c = text_[i];
            if (c == '\n') {
                line_start = true;
                ++i;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                ++i;
            } else if (c == '/' && i + 1 < n && text_[i + 1] == '*') {
                const auto end = text_.find("*/", i + 2);
                i = note_comment(i, end == npos ? n : end + 2);
            } else if (c == '/' && i + 1 < n && text_[i + 1] == '/') {
                const auto end = text_.find('\n', i);
                i = note_comment(i, end == npos ? n : end);
            } else if (c == '#' && line_start) {
                i = directive(i);
                line_start = true;
            } else if (c == '"' || c == '\'') {
                const std::size_t start = i++;
                while (i < n && text_[i] != c && text_[i] != '\n') i += text_[i] == '\\' ? 2 : 1;
                i = std::min(n, i + 1);
                token({Token::Other, text_.substr(start, i - start), start});
                line_start = false;
            } else if (ident_start(c)) {
                const std::size_t start = i;
                while (i < n && ident_char(text_[i])) ++i;
                token({Token::Ident, text_.substr(start, i - start), start});
                line_start = false;
            } else if (c >= '0' && c <= '9') {
                const std::size_t start = i;
                while (i < n && (ident_char(text_[i]) || text_[i] == '.')) ++i;
                token({Token::Other, text_.substr(start, i - start), start});
                line_start = false;
            } else {
                token({Token::Punct, text_.substr(i, 1), i});
                ++i;
                line_start = false;
            }
        }
        return std::move(defs_);
    }

private:
    std::size_t note_comment(std::size_t begin, std::size_t end) {
        if (run_end_ != npos && only_space(text_.substr(run_end_, begin - run_end_))) run_end_ = end;
        else run_begin_ = begin, run_end_ = end;
        return end;
    }

    // Comment run ending right before `offset`, if any.
    std::optional<std::size_t> attached_comment(std::size_t offset) const {
        if (run_end_ == npos || run_end_ > offset) return std::nullopt;
        if (!only_space(text_.substr(run_end_, offset - run_end_))) return std::nullopt;
        return run_begin_;
    }

    std::size_t directive(std::size_t begin) {
        const std::size_t n = text_.size();
        std::size_t end = begin;
        while (end < n) {
            const auto nl = text_.find('\n', end);
            if (nl == npos) {
                end = n;
                break;
            }
            std::size_t k = nl;
            while (k > begin && (text_[k - 1] == '\r')) --k;
            if (k > begin && text_[k - 1] == '\\') {
                end = nl + 1;
                continue;
            }
            end = nl;
            break;
        }
        const std::string_view line = text_.substr(begin, end - begin);
        std::size_t p = 1;
        while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
        if (line.substr(p, 6) == "define" && p + 6 < line.size() && !ident_char(line[p + 6])) {
            p += 6;
            while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
            const std::size_t name_begin = p;
            while (p < line.size() && ident_char(line[p])) ++p;
            if (p > name_begin && ident_start(line[name_begin])) {
                Definition d = make(std::string(line.substr(name_begin, p - name_begin)), SymbolKind::Macro, begin);
                std::set<std::string_view> params;
                std::size_t body = p;
                if (p < line.size() && line[p] == '(') {
                    const auto close = line.find(')', p);
                    const std::size_t stop = close == npos ? line.size() : close;
                    for_each_identifier(line.substr(p, stop - p),
                                        [&](std::size_t, std::string_view id) { params.insert(id); });
                    body = close == npos ? line.size() : close + 1;
                }
                for_each_identifier(line.substr(body), [&](std::size_t, std::string_view id) {
                    if (!params.count(id) && !is_c_keyword(id) && id != "__VA_ARGS__")
                        d.body_identifiers.emplace(id);
                });
                finish(std::move(d), end);
            }
        }
        run_end_ = npos;
        return end;
    }

    Definition make(std::string name, SymbolKind kind, std::size_t begin) const {
        Definition d;
        d.symbol = std::move(name);
        d.path = path_;
        d.kind = kind;
        d.begin_offset = begin;
        d.comment_offset = attached_comment(begin);
        if (d.comment_offset) d.leading_comment = std::string(text_.substr(*d.comment_offset, run_end_ - *d.comment_offset));
        return d;
    }

    void finish(Definition d, std::size_t end) {
        d.end_offset = end;
        d.begin_line = lines_.line_of(d.begin_offset);
        d.end_line = lines_.line_of(end == 0 ? 0 : end - 1);
        defs_.push_back(std::move(d));
    }

    void token(const Token& t) {
        if (depth_ > 0) {
            if (t.kind == Token::Punct && t.text == "{") ++depth_;
            else if (t.kind == Token::Punct && t.text == "}") {
                if (--depth_ == 0) close_block(t.offset + 1);
            } else if (t.kind == Token::Ident && (open_ == OpenKind::Function || open_ == OpenKind::Type) &&
                       !is_c_keyword(t.text)) {
                body_ids_.emplace(t.text);
            }
            return;
        }
        if (t.kind == Token::Punct && t.text == ";") {
            end_statement(t.offset + 1);
            return;
        }
        if (t.kind == Token::Punct && t.text == "}") return;  // unbalanced; ignore
        if (t.kind == Token::Punct && t.text == "{") {
            open_block(t.offset);
            return;
        }
        if (stmt_.empty()) {
            stmt_begin_ = t.offset;
            stmt_comment_ = attached_comment(t.offset);
            stmt_comment_end_ = run_end_;
        }
        stmt_.push_back(t);
    }

    bool stmt_has(std::string_view punct) const {
        return std::any_of(stmt_.begin(), stmt_.end(),
                           [&](const Token& t) { return t.kind == Token::Punct && t.text == punct; });
    }

    void open_block(std::size_t offset) {
        depth_ = 1;
        body_ids_.clear();
        open_ = OpenKind::Opaque;
        open_name_.clear();
        if (stmt_.empty() || after_type_body_) {
            if (after_type_body_) open_ = OpenKind::Initializer;
            return;
        }
        if (stmt_has("=")) {
            open_ = OpenKind::Initializer;
            return;
        }
        // struct/union/enum NAME {  or an anonymous aggregate
        const auto& last = stmt_.back();
        for (std::size_t k = stmt_.size(); k-- > 0;) {
            const auto& w = stmt_[k].text;
            if (stmt_[k].kind == Token::Ident && (w == "struct" || w == "union" || w == "enum")) {
                if (k + 1 == stmt_.size()) {
                    open_ = OpenKind::Type;
                } else if (k + 2 == stmt_.size() && last.kind == Token::Ident) {
                    open_ = OpenKind::Type;
                    open_name_ = std::string(last.text);
                }
                if (open_ == OpenKind::Type) return;
                break;
            }
        }
        if (stmt_has("(") && last.kind == Token::Punct && last.text == ")") {
            for (std::size_t k = 0; k + 1 < stmt_.size(); ++k) {
                if (stmt_[k].kind == Token::Ident && stmt_[k + 1].kind == Token::Punct && stmt_[k + 1].text == "(" &&
                    !is_attribute_word(stmt_[k].text) && !is_c_keyword(stmt_[k].text)) {
                    open_ = OpenKind::Function;
                    open_name_ = std::string(stmt_[k].text);
                    return;
                }
            }
        }
        (void)offset;
    }

    void close_block(std::size_t end) {
        switch (open_) {
        case OpenKind::Function: {
            if (!open_name_.empty()) {
                Definition d = def_from_statement(open_name_, SymbolKind::Function);
                finish(std::move(d), end);
            }
            reset_statement();
            break;
        }
        case OpenKind::Type:
            pending_type_ = open_name_;
            pending_ids_ = body_ids_;
            after_type_body_ = true;
            break;
        case OpenKind::Initializer:
            break;  // the statement ends at the next ';'
        case OpenKind::Opaque:
        case OpenKind::None:
            reset_statement();
            break;
        }
        open_ = OpenKind::None;
    }

    Definition def_from_statement(const std::string& name, SymbolKind kind) {
        Definition d;
        d.symbol = name;
        d.path = path_;
        d.kind = kind;
        d.begin_offset = stmt_begin_;
        d.comment_offset = stmt_comment_;
        if (stmt_comment_) d.leading_comment = std::string(text_.substr(*stmt_comment_, stmt_comment_end_ - *stmt_comment_));
        for (const auto& id : (kind == SymbolKind::Function ? body_ids_ : pending_ids_)) d.body_identifiers.insert(id);
        return d;
    }

    void end_statement(std::size_t end) {
        const bool is_typedef = !stmt_.empty() && stmt_.front().kind == Token::Ident && stmt_.front().text == "typedef";
        if (after_type_body_) {
            if (!pending_type_.empty()) finish(def_from_statement(pending_type_, SymbolKind::Type), end);
            if (is_typedef) {
                // typedef struct X { ... } alias;
                if (auto alias = last_identifier(); alias && *alias != pending_type_)
                    finish(def_from_statement(*alias, SymbolKind::Type), end);
            }
        } else if (is_typedef) {
            pending_ids_.clear();
            for (std::size_t k = 1; k < stmt_.size(); ++k)
                if (stmt_[k].kind == Token::Ident && !is_c_keyword(stmt_[k].text)) pending_ids_.emplace(stmt_[k].text);
            if (auto name = typedef_name()) {
                pending_ids_.erase(*name);
                finish(def_from_statement(*name, SymbolKind::Type), end);
            }
        }
        reset_statement();
    }

    std::optional<std::string> last_identifier() const {
        for (std::size_t k = stmt_.size(); k-- > 0;) {
            if (stmt_[k].kind == Token::Ident && !is_attribute_word(stmt_[k].text)) return std::string(stmt_[k].text);
            if (stmt_[k].kind == Token::Punct && stmt_[k].text == "}") break;
        }
        return std::nullopt;
    }

    // typedef int (*name)(...);  or  typedef unsigned long name;
    std::optional<std::string> typedef_name() const {
        for (std::size_t k = 0; k + 2 < stmt_.size(); ++k)
            if (stmt_[k].text == "(" && stmt_[k + 1].text == "*" && stmt_[k + 2].kind == Token::Ident)
                return std::string(stmt_[k + 2].text);
        for (std::size_t k = stmt_.size(); k-- > 1;) {
            if (stmt_[k].kind == Token::Ident && !is_c_keyword(stmt_[k].text)) return std::string(stmt_[k].text);
            if (stmt_[k].kind == Token::Punct && stmt_[k].text == ")") return std::nullopt;
        }
        return std::nullopt;
    }

    void reset_statement() {
        stmt_.clear();
        after_type_body_ = false;
        pending_type_.clear();
        pending_ids_.clear();
    }

    std::string_view text_;
    const std::string& path_;
    LineMap lines_;
    std::vector<Definition> defs_;

    std::size_t run_begin_ = npos;
    std::size_t run_end_ = npos;

    int depth_ = 0;
    OpenKind open_ = OpenKind::None;
    std::string open_name_;
    std::set<std::string> body_ids_;

    std::vector<Token> stmt_;
    std::size_t stmt_begin_ = 0;
    std::optional<std::size_t> stmt_comment_;
    std::size_t stmt_comment_end_ = 0;
    bool after_type_body_ = false;
    std::string pending_type_;
    std::set<std::string> pending_ids_;
};

bool is_c_source(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".c" || ext == ".h";
}

std::vector<fs::path> source_files(const fs::path& root) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec), end;
         !ec && it != end; it.increment(ec)) {
        if (it->is_regular_file(ec) && is_c_source(it->path())) files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::string relative_name(const fs::path& file, const fs::path& root) {
    return fs::relative(file, root).generic_string();
}

std::optional<std::string> slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return ss.str();
}

} // namespace

std::string_view to_string(SymbolKind k) noexcept {
    switch (k) {
    case SymbolKind::Function: return "function";
    case SymbolKind::Type: return "type";
    case SymbolKind::Macro: return "macro";
    }
    return "unknown";
}

std::optional<SymbolKind> parse_symbol_kind(std::string_view s) noexcept {
    if (s == "function") return SymbolKind::Function;
    if (s == "type") return SymbolKind::Type;
    if (s == "macro") return SymbolKind::Macro;
    return std::nullopt;
}

std::vector<Definition> scan_source(std::string_view text, const std::string& path) {
    return Scanner(text, path).run();
}

const std::vector<Definition>* SymbolIndex::find(std::string_view symbol) const {
    auto it = symbols.find(std::string(symbol));
    return it == symbols.end() ? nullptr : &it->second;
}

std::size_t SymbolIndex::definition_count() const {
    std::size_t n = 0;
    for (const auto& [_, defs] : symbols) n += defs.size();
    return n;
}

std::string tree_digest(const fs::path& source_root) {
    std::string acc;
    for (const auto& file : source_files(source_root)) {
        auto text = slurp(file);
        acc += relative_name(file, source_root) + "\n" + (text ? sha256_hex(*text) : std::string("unreadable")) + "\n";
    }
    return sha256_hex(acc);
}

SymbolIndex build_index(const fs::path& source_root) {
    if (!fs::is_directory(source_root)) throw PreconditionError("source root is not a directory: " + source_root.string());
    SymbolIndex idx;
    idx.root = source_root;
    std::string acc;
    for (const auto& file : source_files(source_root)) {
        const std::string rel = relative_name(file, source_root);
        auto text = slurp(file);
        acc += rel + "\n" + (text ? sha256_hex(*text) : std::string("unreadable")) + "\n";
        if (!text) {
            ++idx.files_skipped;
            continue;
        }
        ++idx.files_scanned;
        for (auto& d : scan_source(*text, rel)) idx.symbols[d.symbol].push_back(std::move(d));
    }
    for (auto& [_, defs] : idx.symbols)
        std::stable_sort(defs.begin(), defs.end(), [](const Definition& a, const Definition& b) {
            return std::tie(a.path, a.begin_offset) < std::tie(b.path, b.begin_offset);
        });
    idx.tree_digest = sha256_hex(acc);
    return idx;
}

void save_index(const SymbolIndex& index, const fs::path& file) {
    ordered_json header;
    header["format"] = 1;
    header["tree_digest"] = index.tree_digest;
    header["files_scanned"] = index.files_scanned;
    header["files_skipped"] = index.files_skipped;
    std::string out = header.dump() + "\n";
    for (const auto& [sym, defs] : index.symbols) {
        for (const auto& d : defs) {
            ordered_json j;
            j["symbol"] = sym;
            j["kind"] = std::string(to_string(d.kind));
            j["path"] = d.path;
            j["span"] = {d.begin_line, d.end_line};
            j["range"] = {d.begin_offset, d.end_offset};
            j["comment_offset"] = d.comment_offset ? ordered_json(*d.comment_offset) : ordered_json(nullptr);
            j["comment"] = d.leading_comment ? ordered_json(*d.leading_comment) : ordered_json(nullptr);
            j["body_identifiers"] = d.body_identifiers;
            out += j.dump() + "\n";
        }
    }
    text::write_file(file.string(), out);
}

SymbolIndex load_index(const fs::path& file, const fs::path& source_root) {
    std::istringstream in(text::read_file(file.string()));
    std::string line;
    SymbolIndex idx;
    idx.root = source_root;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw StructuralError("index line is not JSON: " + std::string(e.what()));
        }
        if (!header) {
            if (j.value("format", 0) != 1) throw StructuralError("unknown index format");
            idx.tree_digest = j.at("tree_digest").get<std::string>();
            idx.files_scanned = j.at("files_scanned").get<std::size_t>();
            idx.files_skipped = j.at("files_skipped").get<std::size_t>();
            header = true;
            continue;
        }
        Definition d;
        d.symbol = j.at("symbol").get<std::string>();
        auto kind = parse_symbol_kind(j.at("kind").get<std::string>());
        if (!kind) throw StructuralError("unknown symbol kind in index");
        d.kind = *kind;
        d.path = j.at("path").get<std::string>();
        d.begin_line = j.at("span").at(0).get<std::size_t>();
        d.end_line = j.at("span").at(1).get<std::size_t>();
        d.begin_offset = j.at("range").at(0).get<std::size_t>();
        d.end_offset = j.at("range").at(1).get<std::size_t>();
        if (!j.at("comment_offset").is_null()) d.comment_offset = j["comment_offset"].get<std::size_t>();
        if (!j.at("comment").is_null()) d.leading_comment = j["comment"].get<std::string>();
        d.body_identifiers = j.at("body_identifiers").get<std::set<std::string>>();
        idx.symbols[d.symbol].push_back(std::move(d));
    }
    if (!header) throw StructuralError("empty index file");
    return idx;
}

SymbolIndex load_or_build_index(const fs::path& source_root, const fs::path& cache_file) {
    if (fs::exists(cache_file)) {
        try {
            auto idx = load_index(cache_file, source_root);
            if (idx.tree_digest == tree_digest(source_root)) return idx;
        } catch (const Error&) {
            // fall through to a rebuild
        }
    }
    auto idx = build_index(source_root);
    save_index(idx, cache_file);
    return idx;
}

std::vector<std::string> extract_symbols(const corpus::Patch& patch) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> seen;  // name -> (count, first)
    std::size_t order = 0;
    auto note = [&](std::string_view id) {
        if (id.size() < 2 || is_c_keyword(id)) return;
        auto [it, fresh] = seen.try_emplace(std::string(id), 0, order);
        if (fresh) ++order;
        ++it->second.first;
    };
    for (const auto& h : patch.diff) {
        if (h.section_heading) {
            const std::string& heading = *h.section_heading;
            // The function name is the first identifier followed by '('.
            std::optional<std::string_view> fn;
            for_each_identifier(heading, [&](std::size_t off, std::string_view id) {
                if (fn || is_attribute_word(id) || is_c_keyword(id)) return;
                std::size_t k = off + id.size();
                while (k < heading.size() && heading[k] == ' ') ++k;
                if (k < heading.size() && heading[k] == '(') fn = id;
            });
            if (fn) note(*fn);
            else for_each_identifier(heading, [&](std::size_t, std::string_view id) { note(id); });
        }
        for (const auto& line : h.lines) {
            if (line.kind == corpus::DiffLineKind::Context) continue;
            for_each_identifier(line.text, [&](std::size_t, std::string_view id) { note(id); });
        }
    }
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> ranked(seen.begin(), seen.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.first != b.second.first) return a.second.first > b.second.first;
        return a.second.second < b.second.second;
    });
    std::vector<std::string> out;
    out.reserve(ranked.size());
    for (auto& [name, _] : ranked) out.push_back(name);
    return out;
}

std::size_t ContextResult::total_chars() const {
    std::size_t n = 0;
    for (const auto& e : excerpts) n += e.text.size();
    return n;
}

bool ContextResult::truncated() const {
    return std::any_of(excerpts.begin(), excerpts.end(), [](const CodeExcerpt& e) { return e.truncated; });
}

ContextResult fetch_context(const std::vector<std::string>& symbols, const SymbolIndex& index, std::size_t budget) {
    if (budget == 0) throw PreconditionError("context budget must be positive");
    ContextResult res;
    std::map<std::string, std::optional<std::string>> files;
    std::size_t left = budget;
    std::set<std::string> done;
    for (const auto& sym : symbols) {
        if (!done.insert(sym).second) continue;
        const auto* defs = index.find(sym);
        if (!defs) {
            res.misses.push_back(sym);
            continue;
        }
        if (left == 0) {
            res.over_budget.push_back(sym);
            continue;
        }
        for (const auto& d : *defs) {
            if (left == 0) break;
            auto it = files.find(d.path);
            if (it == files.end()) it = files.emplace(d.path, slurp(index.root / d.path)).first;
            if (!it->second) continue;
            const std::string& file = *it->second;
            const std::size_t begin = d.comment_offset.value_or(d.begin_offset);
            if (d.end_offset > file.size() || begin > d.end_offset) continue;  // stale index entry
            std::string_view full(file.data() + begin, d.end_offset - begin);
            CodeExcerpt ex{sym, d.path, d.begin_line, {}, false};
            if (full.size() > left) {
                ex.text = std::string(text::utf8_prefix(full, left));
                ex.truncated = true;
            } else {
                ex.text = std::string(full);
            }
            left -= ex.text.size();
            if (ex.truncated) left = 0;
            res.excerpts.push_back(std::move(ex));
        }
    }
    return res;
}

std::string render_context(const ContextResult& ctx) {
    std::string out;
    for (const auto& e : ctx.excerpts) {
        out += "/* " + e.path + ":" + std::to_string(e.begin_line) + " (" + e.symbol + ")" +
               (e.truncated ? " [truncated]" : "") + " */\n" + e.text + "\n\n";
    }
    if (!ctx.misses.empty()) out += "/* no definition found for: " + text::join(ctx.misses, ", ") + " */\n";
    return out;
}

CallPaths call_paths(const std::string& symbol, const SymbolIndex& index, std::size_t max_depth,
                     std::size_t max_chains) {
    if (max_depth < 1) throw PreconditionError("max_depth must be at least 1");
    CallPaths res;
    if (!index.find(symbol)) return res;

    auto callees = [&](const std::string& s) {
        std::set<std::string> out;
        const auto* defs = index.find(s);
        if (!defs) return out;
        for (const auto& d : *defs)
            for (const auto& id : d.body_identifiers) {
                const auto* target = index.find(id);
                if (!target) continue;
                if (std::any_of(target->begin(), target->end(), [](const Definition& t) {
                        return t.kind == SymbolKind::Function || t.kind == SymbolKind::Macro;
                    }))
                    out.insert(id);
            }
        return out;
    };

    std::vector<std::string> path{symbol};
    std::function<void()> walk = [&] {
        if (res.chains.size() >= max_chains) {
            res.limited = true;
            return;
        }
        std::vector<std::string> next;
        for (const auto& c : callees(path.back())) {
            if (std::find(path.begin(), path.end(), c) != path.end()) res.cuts.push_back({path, c, true});
            else next.push_back(c);
        }
        if (next.empty()) {
            res.chains.push_back(path);
            return;
        }
        if (path.size() >= max_depth) {
            for (const auto& c : next) res.cuts.push_back({path, c, false});
            res.chains.push_back(path);
            return;
        }
        for (const auto& c : next) {
            path.push_back(c);
            walk();
            path.pop_back();
        }
    };
    walk();
    return res;
}

} // namespace reviewlore::codectx
