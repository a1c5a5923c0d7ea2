#include <doctest.h>

#include <set>

#include "gen_corpus.hpp"
#include "support.hpp"

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/gzip.hpp"
#include "reviewlore/common/text.hpp"
#include "reviewlore/corpus/email.hpp"
#include "reviewlore/corpus/mime.hpp"
#include "reviewlore/corpus/patch.hpp"
#include "reviewlore/corpus/stats.hpp"
#include "reviewlore/corpus/store.hpp"
#include "reviewlore/corpus/thread.hpp"

using namespace reviewlore;
using namespace reviewlore::corpus;

namespace {

const char* kTwo =
    "From a@example.org Mon Jan  1 00:00:00 2024\n"
    "From: Ana Silva <ana.silva@example.pt>\n"
    "Date: Mon, 01 Jan 2024 10:00:00 +0100\n"
    "Subject: [PATCH v2 1/2] lib: add thing\n"
    "Message-ID: <one@example.org>\n"
    "\n"
    "Body line.\n"
    ">From the top, quoted once.\n"
    "\n"
    "From b@example.org Mon Jan  1 00:00:00 2024\n"
    "From: =?utf-8?q?Jos=C3=A9?= <jose@example.org>\n"
    "Date: Tue, 02 Jan 2024 10:00:00 +0000\n"
    "Subject: Re: [PATCH v2 1/2] lib: add thing\n"
    "Message-ID: <two@example.org>\n"
    "In-Reply-To: <one@example.org>\n"
    "References: <one@example.org>\n"
    "Content-Type: text/plain; charset=iso-8859-1\n"
    "Content-Transfer-Encoding: quoted-printable\n"
    "\n"
    "caf=E9 ok\n";

} // namespace

TEST_CASE("mbox framing, header decoding and mboxrd unquoting") {
    const auto r = parse_mbox(kTwo);
    REQUIRE(r.messages.size() == 2);
    const auto& a = r.messages[0];
    CHECK(a.message_id == "one@example.org");
    CHECK(a.author.name == "Ana Silva");
    CHECK(a.author.address == "ana.silva@example.pt");
    CHECK(a.date == 1704099600);
    CHECK(a.body.find("\nFrom the top") != std::string::npos);
    const auto& b = r.messages[1];
    CHECK(b.author.name == "Jos\xc3\xa9");
    CHECK(b.in_reply_to == std::optional<std::string>("one@example.org"));
    CHECK(b.body.find("caf\xc3\xa9 ok") != std::string::npos);
}

TEST_CASE("mbox input must start with a From line") {
    CHECK_THROWS_AS(parse_mbox("Subject: x\n\nbody\n"), MboxFramingError);
}

TEST_CASE("gzip mbox is detected") {
    const auto r = parse_mbox(gzip_compress(kTwo));
    CHECK(r.messages.size() == 2);
}

TEST_CASE("missing Message-ID gets a stable synthetic id; duplicates keep the first") {
    std::string mbox =
        "From x Mon Jan  1 00:00:00 2024\nFrom: a@example.org\nSubject: s\n\nhello\n\n"
        "From x Mon Jan  1 00:00:00 2024\nFrom: a@example.org\nMessage-ID: <d@x>\nSubject: first\n\nA\n\n"
        "From x Mon Jan  1 00:00:00 2024\nFrom: a@example.org\nMessage-ID: <d@x>\nSubject: second\n\nB\n";
    const auto r1 = parse_mbox(mbox);
    const auto r2 = parse_mbox(mbox);
    REQUIRE(r1.messages.size() == 2);
    CHECK(r1.messages[0].synthetic_id);
    CHECK(r1.messages[0].message_id == r2.messages[0].message_id);
    CHECK(r1.messages[1].subject == "first");
    CHECK(r1.diagnostics.size() >= 2);
}

TEST_CASE("mime decoders") {
    CHECK(mime::decode_quoted_printable("a=3Db=\nc") == "a=bc");
    CHECK(mime::decode_base64("aGVsbG8=") == "hello");
    CHECK_THROWS_AS(mime::decode_base64("a$b="), Error);
    CHECK(mime::latin1_to_utf8("\xe9") == "\xc3\xa9");
    CHECK(mime::decode_header_words("=?utf-8?b?SMOpbGxv?= world") == "H\xc3\xa9llo world");
    const auto ct = mime::parse_content_type("text/plain; charset=\"UTF-8\"; format=flowed");
    CHECK(ct.subtype == "plain");
    CHECK(ct.params.at("charset") == "UTF-8");
}

TEST_CASE("dates and addresses") {
    CHECK(parse_rfc5322_date("Tue, 07 Jan 2025 18:03:00 +0000") == 1736272980);
    CHECK(parse_rfc5322_date("7 Jan 2025 19:03:00 +0100") == 1736272980);
    CHECK_FALSE(parse_rfc5322_date("yesterday").has_value());
    CHECK(parse_mailbox("\"Berg, Tom\" <tom@example.com>").address == "tom@example.com");
    CHECK(parse_message_ids("<a@b> junk <c@d>") == std::vector<std::string>{"a@b", "c@d"});
}

TEST_CASE("threading follows In-Reply-To, then References, and cuts cycles") {
    std::vector<EmailMessage> ms(4);
    ms[0].message_id = "r";
    ms[0].date = 1;
    ms[1].message_id = "a";
    ms[1].date = 2;
    ms[1].in_reply_to = "missing";
    ms[1].references = {"r", "missing"};
    ms[2].message_id = "x";
    ms[2].date = 3;
    ms[2].in_reply_to = "y";
    ms[3].message_id = "y";
    ms[3].date = 4;
    ms[3].in_reply_to = "x";
    const auto t = build_threads(ms);
    REQUIRE(t.threads.size() == 2);
    CHECK(t.threads[0].root_id == "r");
    CHECK(t.threads[0].reply_edges.at("a") == "r");
    // y is the later message, so its edge is the one dropped.
    CHECK(t.threads[1].root_id == "y");
    REQUIRE(t.broken_edges.size() == 1);
    CHECK(t.broken_edges[0].child == "y");
}

TEST_CASE("unified diff parsing and bookkeeping") {
    const std::string diff =
        "diff --git a/mm/a.c b/mm/a.c\n--- a/mm/a.c\n+++ b/mm/a.c\n"
        "@@ -10,3 +10,4 @@ static int foo(void)\n x\n-y\n+z\n+w\n q\n"
        "@@ -30,2 +31,2 @@\n a\n-b\n";
    const auto r = parse_unified_diff(diff);
    REQUIRE(r.hunks.size() == 1);
    CHECK(r.hunks[0].consistent());
    CHECK(r.hunks[0].section_heading == std::optional<std::string>("static int foo(void)"));
    CHECK(r.diagnostics.size() == 1);
    CHECK(parse_series_index("[PATCH v3 2/7] x") == std::optional<SeriesIndex>(SeriesIndex{2, 7}));
    CHECK_FALSE(parse_series_index("[PATCH] x").has_value());
}

TEST_CASE("patch and cover letter classification, series assembly") {
    auto r = parse_mbox(text::read_file((testsupport::data_dir() / "pairs" / "pairs.mbox").string()));
    REQUIRE(r.messages.size() == 6);
    auto el = parse_patch(r.messages[0]);
    REQUIRE(el.has_value());
    REQUIRE(std::holds_alternative<Patch>(*el));
    const auto& p = std::get<Patch>(*el);
    CHECK(p.touched_files() == std::vector<std::string>{"mm/zswap.c"});
    CHECK(p.commit_message.find("crypto_acomp") != std::string::npos);
    CHECK(p.commit_message.find("diff --git") == std::string::npos);

    EmailMessage cover;
    cover.message_id = "c@x";
    cover.subject = "[PATCH 0/2] series";
    cover.body = "Two patches.\n";
    auto cel = parse_patch(cover);
    REQUIRE(cel.has_value());
    CHECK(std::holds_alternative<CoverLetter>(*cel));

    EmailMessage p2 = r.messages[0], p1 = r.messages[2];
    p2.subject = "[PATCH 2/2] b";
    p1.subject = "[PATCH 1/2] a";
    std::vector<EmailMessage> ms{p2, cover, p1};
    const auto s = assemble_series(ms);
    REQUIRE(s.patches.size() == 2);
    CHECK(s.patches[0].subject == "[PATCH 1/2] a");
    CHECK(s.id() == "c@x");
}

TEST_CASE("generated corpus: partition and diff bookkeeping hold") {
    const auto g = testsupport::generate_corpus(1500, 7);
    auto parsed = parse_mbox(g.mbox);
    REQUIRE(parsed.messages.size() == g.messages);
    std::vector<EmailMessage> roots;
    for (const auto& m : parsed.messages)
        if (g.patches.count(m.message_id)) roots.push_back(m);
    const auto t = build_threads(std::move(parsed.messages));
    CHECK(t.threads.size() == g.expected_threads);
    std::size_t members = 0;
    for (const auto& th : t.threads) {
        members += th.members.size();
        CHECK(th.reply_edges.size() == th.members.size() - 1);
        for (const auto& m : th.members) CHECK(g.root_of.at(m.message_id) == th.root_id);
    }
    CHECK(members == g.messages);
    for (const auto& m : roots) {
        auto el = parse_patch(m);
        REQUIRE(el.has_value());
        const auto& p = std::get<Patch>(*el);
        const auto& want = g.patches.at(m.message_id);
        REQUIRE(p.diff.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(p.diff[i].consistent());
            CHECK(p.diff[i].path() == want[i].path);
        }
    }
}

TEST_CASE("corpus stats: fixed seed is reproducible; unreviewed fraction") {
    auto r = parse_mbox(text::read_file((testsupport::data_dir() / "corpus" / "stats10.mbox").string()));
    const auto t = build_threads(std::move(r.messages));
    REQUIRE(t.threads.size() == 10);
    StatsOptions o;
    o.period = StatsPeriod::All;
    o.maintainers = {"maya.chen@example.org"};
    const auto rep = corpus_stats(t.threads, o);
    REQUIRE(rep.periods.size() == 1);
    CHECK(rep.periods[0].patch_threads == 10);
    CHECK(rep.periods[0].unreviewed == 6);
    CHECK(rep.periods[0].unreviewed_fraction == doctest::Approx(0.6));
    CHECK(rep.periods[0].maintainer_reply_fraction == doctest::Approx(1.0));

    o.sample_size = 5;
    o.seed = 11;
    CHECK(corpus_stats(t.threads, o) == corpus_stats(t.threads, o));
    o.sample_size = 50;
    CHECK(corpus_stats(t.threads, o).periods[0].sample_clamped);
    const double xs[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(nearest_rank_percentile(xs, 0.5) == 5);
    CHECK(nearest_rank_percentile(xs, 0.9) == 9);
}

TEST_CASE("corpus store persists and reloads messages") {
    testsupport::TempDir dir;
    const auto r = parse_mbox(kTwo);
    {
        CorpusStore s(dir / "store");
        CHECK(s.add(r.messages) == 2);
        CHECK(s.add(r.messages) == 0);
    }
    CorpusStore s(dir / "store");
    CHECK(s.size() == 2);
    CHECK(s.find("two@example.org") == std::optional<EmailMessage>(r.messages[1]));
    CHECK(s.load_all() == r.messages);
}
