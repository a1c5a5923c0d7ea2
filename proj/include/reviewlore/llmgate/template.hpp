#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace reviewlore::llmgate {

using Variables = std::map<std::string, std::string>;

enum class OutputKind { FreeText, StructuredDocument };

// A versioned prompt with {{name}} placeholders.
struct PromptTemplate {
    std::string id;
    int version = 1;
    OutputKind output_kind = OutputKind::FreeText;
    std::string body;

    std::set<std::string> placeholders() const;

    // Substitutes every placeholder; values are inserted verbatim and are not
    // rescanned. Throws PreconditionError naming the first unbound placeholder.
    std::string render(const Variables& vars) const;
};

// Template file format:
//
//   id: rules.extract
//   version: 1
//   output: structured_document
//   ---
//   <body>
PromptTemplate parse_template(std::string_view contents, const std::string& origin = "<memory>");

class TemplateRegistry {
public:
    // Loads every *.tmpl file in `dir`.
    static TemplateRegistry load_dir(const std::filesystem::path& dir);

    void add(PromptTemplate t);
    const PromptTemplate& get(const std::string& id) const;
    bool contains(const std::string& id) const { return templates_.count(id) != 0; }

private:
    std::map<std::string, PromptTemplate> templates_;
};

// Canonical form of a rendered prompt: LF line endings.
std::string canonical_prompt(std::string_view rendered);

// sha256 over template id, version and canonical prompt text.
std::string request_digest(const std::string& template_id, int version, std::string_view rendered_prompt);

// Compiled-in location of the shipped template files.
std::filesystem::path default_template_dir();

} // namespace reviewlore::llmgate
