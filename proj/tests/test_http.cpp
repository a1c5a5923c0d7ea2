#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "support.hpp"

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/gzip.hpp"
#include "reviewlore/corpus/fetch.hpp"
#include "reviewlore/llmgate/http_provider.hpp"

using namespace reviewlore;

namespace {

// Loopback server on an ephemeral port for the lifetime of the object.
class Loopback {
public:
    Loopback() {
        port_ = server.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~Loopback() {
        server.stop();
        thread_.join();
    }
    std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

    httplib::Server server;

private:
    int port_ = 0;
    std::thread thread_;
};

} // namespace

TEST_CASE("http provider retries 429 through the gateway and parses choices") {
    Loopback lb;
    std::atomic<int> hits{0};
    nlohmann::json seen;
    lb.server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
        if (++hits <= 2) {
            res.status = 429;
            return;
        }
        seen = nlohmann::json::parse(req.body);
        nlohmann::json out{{"choices", nlohmann::json::array()}};
        for (int i = 0; i < seen["n"].get<int>(); ++i)
            out["choices"].push_back({{"message", {{"content", "{\"k\": " + std::to_string(i) + "}"}}},
                                      {"finish_reason", "stop"}});
        res.set_content(out.dump(), "application/json");
    });
    auto pc = llmgate::parse_provider_config("provider=loop\nmodel=m1\nendpoint=" + lb.url("/v1/chat") + "\n");
    auto provider = std::make_shared<llmgate::HttpProvider>(pc);
    CHECK(provider->name() == "loop:m1");
    llmgate::GatewayOptions opts;
    opts.backoff_initial = std::chrono::milliseconds(1);
    auto gw = testsupport::scripted_gateway(provider, opts);
    const auto r = gw->complete({"validate.rank", {{"summary", "s"}, {"context", "c"}, {"rules", "r"}}, 0.2, 2});
    CHECK(hits == 3);
    CHECK(r.retries == 2);
    REQUIRE(r.candidates.size() == 2);
    CHECK(r.candidates[1].text == "{\"k\": 1}");
    CHECK(seen["model"] == "m1");
    CHECK(seen["messages"][0]["content"].get<std::string>().find("Rank the numbered") != std::string::npos);
}

TEST_CASE("http provider maps client errors to non-retryable failures") {
    Loopback lb;
    lb.server.Post("/x", [](const httplib::Request&, httplib::Response& res) {
        res.status = 400;
        res.set_content("bad", "text/plain");
    });
    llmgate::HttpProvider p(llmgate::parse_provider_config("endpoint=" + lb.url("/x") + "\n"));
    try {
        p.complete({});
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.status() == 400);
        CHECK_FALSE(e.retryable());
    }
}

TEST_CASE("archive fetcher downloads and inflates a thread, reports failures") {
    Loopback lb;
    const std::string mbox = "From x Mon Jan  1 00:00:00 2024\nMessage-ID: <a@b>\n\nhi\n";
    lb.server.Get(R"(/all/(.+)/t\.mbox\.gz)", [&](const httplib::Request& req, httplib::Response& res) {
        if (req.matches[1] != "a%40b" && req.matches[1] != "a@b") {
            res.status = 404;
            return;
        }
        res.set_content(gzip_compress(mbox), "application/gzip");
    });
    corpus::ArchiveFetcher f(lb.url("/all"), std::chrono::seconds(5));
    const auto ok = f.fetch_thread("a@b");
    REQUIRE(ok.mbox.has_value());
    CHECK(*ok.mbox == mbox);
    const auto missing = f.fetch_thread("nope@b");
    CHECK_FALSE(missing.mbox.has_value());
    CHECK(missing.error.find("404") != std::string::npos);

    corpus::ArchiveFetcher dead("http://127.0.0.1:1", std::chrono::seconds(1));
    CHECK_FALSE(dead.fetch_thread("a@b").mbox.has_value());
}
