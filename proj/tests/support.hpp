#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "reviewlore/llmgate/gateway.hpp"
#include "reviewlore/llmgate/provider.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(REVIEWLORE_TEST_DATA); }
inline fs::path golden_dir() { return fs::path(REVIEWLORE_TEST_GOLDEN); }

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("reviewlore-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline std::shared_ptr<const reviewlore::llmgate::TemplateRegistry> shipped_templates() {
    static auto t = std::make_shared<const reviewlore::llmgate::TemplateRegistry>(
        reviewlore::llmgate::TemplateRegistry::load_dir(reviewlore::llmgate::default_template_dir()));
    return t;
}

// Live gateway over an in-process responder; backoff never sleeps.
inline std::shared_ptr<reviewlore::llmgate::Gateway> scripted_gateway(
    std::shared_ptr<reviewlore::llmgate::Provider> provider, reviewlore::llmgate::GatewayOptions opts = {}) {
    opts.mode = reviewlore::llmgate::GatewayMode::Live;
    if (!opts.sleep) opts.sleep = [](std::chrono::milliseconds) {};
    return std::make_shared<reviewlore::llmgate::Gateway>(shipped_templates(), opts, std::move(provider));
}

inline std::shared_ptr<reviewlore::llmgate::Gateway> scripted_gateway(
    reviewlore::llmgate::ScriptedProvider::Responder responder) {
    return scripted_gateway(std::make_shared<reviewlore::llmgate::ScriptedProvider>(std::move(responder)));
}

// Replay gateway over the packaged fixtures.
inline std::shared_ptr<reviewlore::llmgate::Gateway> replay_gateway() {
    reviewlore::llmgate::GatewayOptions opts;
    opts.fixture_dir = data_dir() / "fixtures";
    return std::make_shared<reviewlore::llmgate::Gateway>(shipped_templates(), opts);
}

inline reviewlore::llmgate::ProviderReply reply(const std::string& text) {
    return reviewlore::llmgate::ProviderReply{{reviewlore::llmgate::Candidate{text, "stop"}}};
}

} // namespace testsupport
