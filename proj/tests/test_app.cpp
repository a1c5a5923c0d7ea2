#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "support.hpp"

#include "reviewlore/app/commands.hpp"
#include "reviewlore/app/config.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

using namespace reviewlore;
namespace fs = std::filesystem;

namespace {

std::string golden(const std::string& name) { return text::read_file((testsupport::golden_dir() / name).string()); }

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + REVIEWLORE_CLI + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

} // namespace

TEST_CASE("config keys, files and validation") {
    app::RunConfig c;
    c.load_text("# comment\nn = 5\nmode=rule_free\n\nthreshold=90\n");
    CHECK(c.n == 5);
    CHECK(c.mode == "rule_free");
    CHECK(c.effective_threshold() == 90);
    CHECK_THROWS_AS(c.set("nope", "1"), ConfigError);
    CHECK_THROWS_AS(c.set("n", "x"), ConfigError);
    CHECK_THROWS_AS(c.set("n", "0"), ConfigError);
    CHECK_THROWS_AS(c.set("mode", "other"), ConfigError);
    CHECK_THROWS_AS(c.set("threshold", "101"), ConfigError);
    CHECK_THROWS_AS(c.load_text("no equals sign\n"), ConfigError);

    app::RunConfig weak;
    CHECK(weak.effective_threshold() == 0);
    weak.set("verifier_weak", "true");
    CHECK(weak.effective_threshold() == 90);
}

TEST_CASE("config digest ignores paths but not knobs") {
    app::RunConfig a, b;
    b.fixture_dir = "/elsewhere";
    b.source_root = "/src";
    CHECK(a.digest() == b.digest());
    b.set("top_r", "7");
    CHECK(a.digest() != b.digest());
    CHECK(a.canonical().find("top_r=25\n") != std::string::npos);
}

TEST_CASE("kappa labels parsing") {
    const auto r = app::eval_kappa("human,verifier\nyes,yes\nno,no\n1,0\n# note\n0,0\n");
    CHECK(r.n == 4);
    CHECK(r.observed_agreement == 0.75);
    CHECK_THROWS_AS(app::eval_kappa("yes,yes\nmaybe,no\n"), StructuralError);
}

TEST_CASE("replayed commands reproduce the golden outputs") {
    const auto data = testsupport::data_dir();
    std::ostringstream log;
    app::RunConfig cfg;
    cfg.fixture_dir = (data / "fixtures").string();
    cfg.rule_set = (data / "rules.jsonl").string();
    cfg.source_root = (data / "zswap" / "tree").string();
    const auto series = app::resolve_series(cfg, (data / "gate" / "page_mark.eml").string(), log);
    CHECK(validate::render_report(app::run_validate(cfg, series, log)) == golden("gate_rule_based.txt"));
}

TEST_CASE("cli exit codes and outputs") {
    const auto data = testsupport::data_dir();
    testsupport::TempDir dir;
    const auto out = dir / "report.txt";
    const std::string common = "--fixtures " + quoted(data / "fixtures") + " --rules " + quoted(data / "rules.jsonl") +
                               " --source-root " + quoted(data / "zswap" / "tree");
    CHECK(run_cli(common + " validate " + quoted(data / "zswap" / "acomp.eml") + " --out " + quoted(out)) == 0);
    CHECK(text::read_file(out.string()) == golden("zswap_rule_based.txt"));

    fs::create_directories(dir / "empty");
    CHECK(run_cli("--fixtures " + quoted(dir / "empty") + " --rules " + quoted(data / "rules.jsonl") + " validate " +
                  quoted(data / "zswap" / "acomp.eml")) == 2);
    CHECK(run_cli(common + " validate " + quoted(dir / "missing.eml")) == 1);
    CHECK(run_cli("--set bogus=1 rules query") == 1);

    text::write_file((dir / "labels.csv").string(), "human,verifier\nyes,yes\nno,no\n");
    CHECK(run_cli("eval kappa --labels " + quoted(dir / "labels.csv")) == 0);
}
