#include "reviewlore/llmgate/template.hpp"

#include <algorithm>
#include <cctype>

#include "reviewlore/common/digest.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

#ifndef REVIEWLORE_TEMPLATE_DIR
#define REVIEWLORE_TEMPLATE_DIR "templates"
#endif

namespace reviewlore::llmgate {

namespace {

bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

// Calls `on_text` for literal runs and `on_var` for placeholder names.
template <class OnText, class OnVar>
void scan(std::string_view body, OnText on_text, OnVar on_var) {
    std::size_t pos = 0;
    while (pos < body.size()) {
        const auto open = body.find("{{", pos);
        if (open == std::string_view::npos) break;
        const auto close = body.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        const std::string_view name = body.substr(open + 2, close - open - 2);
        if (name.empty() || !std::all_of(name.begin(), name.end(), name_char)) {
            on_text(body.substr(pos, open + 2 - pos));
            pos = open + 2;
            continue;
        }
        on_text(body.substr(pos, open - pos));
        on_var(name);
        pos = close + 2;
    }
    on_text(body.substr(pos));
}

} // namespace

std::set<std::string> PromptTemplate::placeholders() const {
    std::set<std::string> out;
    scan(body, [](std::string_view) {}, [&](std::string_view n) { out.emplace(n); });
    return out;
}

std::string PromptTemplate::render(const Variables& vars) const {
    std::string out;
    scan(
        body, [&](std::string_view t) { out.append(t); },
        [&](std::string_view n) {
            auto it = vars.find(std::string(n));
            if (it == vars.end())
                throw PreconditionError("template " + id + " v" + std::to_string(version) + ": placeholder {{" +
                                        std::string(n) + "}} is unbound");
            out.append(it->second);
        });
    return out;
}

PromptTemplate parse_template(std::string_view contents, const std::string& origin) {
    const std::string normalized = text::normalize_newlines(contents);
    const auto sep = normalized.find("\n---\n");
    if (sep == std::string::npos) throw ConfigError(origin + ": template header must end with a '---' line");

    PromptTemplate t;
    t.id.clear();
    for (auto line : text::split_lines(std::string_view(normalized).substr(0, sep))) {
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) throw ConfigError(origin + ": bad header line: " + std::string(line));
        const std::string key(text::trim(line.substr(0, colon)));
        const std::string value(text::trim(line.substr(colon + 1)));
        if (key == "id") t.id = value;
        else if (key == "version") t.version = std::stoi(value);
        else if (key == "output") {
            if (value == "structured_document") t.output_kind = OutputKind::StructuredDocument;
            else if (value == "free_text") t.output_kind = OutputKind::FreeText;
            else throw ConfigError(origin + ": unknown output kind " + value);
        } else {
            throw ConfigError(origin + ": unknown header key " + key);
        }
    }
    if (t.id.empty()) throw ConfigError(origin + ": template has no id");
    t.body = normalized.substr(sep + 5);
    return t;
}

TemplateRegistry TemplateRegistry::load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("template directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".tmpl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    TemplateRegistry reg;
    for (const auto& f : files) reg.add(parse_template(text::read_file(f.string()), f.string()));
    return reg;
}

void TemplateRegistry::add(PromptTemplate t) {
    const std::string id = t.id;
    if (!templates_.emplace(id, std::move(t)).second) throw ConfigError("duplicate template id " + id);
}

const PromptTemplate& TemplateRegistry::get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw ConfigError("unknown template " + id);
    return it->second;
}

std::string canonical_prompt(std::string_view rendered) { return text::normalize_newlines(rendered); }

std::string request_digest(const std::string& template_id, int version, std::string_view rendered_prompt) {
    std::string material = template_id;
    material.push_back('\n');
    material += std::to_string(version);
    material.push_back('\n');
    material += canonical_prompt(rendered_prompt);
    return sha256_hex(material);
}

std::filesystem::path default_template_dir() { return REVIEWLORE_TEMPLATE_DIR; }

} // namespace reviewlore::llmgate
