#include <doctest.h>

#include "gen_rules.hpp"
#include "support.hpp"

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"
#include "reviewlore/rulestore/store.hpp"

using namespace reviewlore;
using namespace reviewlore::rulestore;
namespace fs = std::filesystem;

namespace {

RuleSetSnapshot sample(std::size_t n, std::uint32_t seed) {
    RuleSetSnapshot s;
    s.created_at = 1700000000;
    s.generation_config_digest = "0123456789abcdef";
    s.rules = testsupport::random_rules(n, seed);
    return s;
}

} // namespace

TEST_CASE("save and load preserve every field") {
    testsupport::TempDir dir;
    const auto snap = sample(200, 3);
    save(snap, dir / "rules.jsonl");
    CHECK_FALSE(fs::exists(dir / "rules.jsonl.tmp"));
    const auto back = load(dir / "rules.jsonl");
    CHECK(back == snap);
    CHECK(snapshot_digest(back) == snapshot_digest(snap));
    CHECK(serialize(back) == serialize(snap));
}

TEST_CASE("unknown schema versions and tampering are rejected") {
    const auto text = serialize(sample(3, 1));
    std::string v999 = text;
    v999.replace(v999.find("\"schema_version\":1"), 18, "\"schema_version\":999");
    try {
        deserialize(v999);
        FAIL("expected SchemaVersionError");
    } catch (const SchemaVersionError& e) {
        CHECK(e.found() == 999);
    }

    auto lines = text::split(text, '\n');
    auto j = nlohmann::json::parse(lines[1]);
    j["diversity_level"] = j["diversity_level"].get<double>() + 1;
    lines[1] = j.dump();
    CHECK_THROWS_AS(deserialize(text::join(lines, "\n")), StructuralError);

    auto short_text = serialize(sample(3, 1));
    short_text = short_text.substr(0, short_text.rfind('\n', short_text.size() - 2) + 1);
    CHECK_THROWS_AS(deserialize(short_text), StructuralError);
    CHECK_THROWS_AS(deserialize(""), StructuralError);
    CHECK_THROWS_AS(deserialize("{\"schema_version\":1,\"rule_count\":1}\n{\"content\":\"x\"}\n"), StructuralError);
    CHECK_THROWS_AS(load("/nonexistent/rules.jsonl"), PreconditionError);
}

TEST_CASE("the packaged rule set loads with consistent diversity levels") {
    const auto snap = load(testsupport::data_dir() / "rules.jsonl");
    CHECK(snap.rules.size() == 7);
    CHECK(snap.generation_config_digest == "hand-curated");
}

TEST_CASE("query filters by category and text, ordered by diversity") {
    const auto snap = load(testsupport::data_dir() / "rules.jsonl");
    const auto logic = query(snap, {rulegen::Category::Logic, ""});
    REQUIRE_FALSE(logic.empty());
    for (std::size_t i = 1; i < logic.size(); ++i) CHECK(logic[i - 1].diversity_level() >= logic[i].diversity_level());
    for (const auto& r : logic) CHECK(r.category() == rulegen::Category::Logic);
    const auto hits = query(snap, {std::nullopt, "PAGE->FLAGS"});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].content().find("page->flags") != std::string::npos);
    CHECK(query(snap).size() == 7);
}
