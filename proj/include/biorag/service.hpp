#pragma once

#include <memory>
#include <string>

#include "biorag/engine.hpp"

namespace biorag {

// Request/response service over the engine:
//   POST /v1/ask    {"question": ..., "max_iterations"?: ..., "ablation"?: {...}}
//   GET  /v1/health {"status":"ok"}
// Empty question -> 400; engine not ready -> 503.
class AskService {
public:
    explicit AskService(Engine& engine);
    ~AskService();

    // Binds to host:port (port 0 picks a free port); returns the bound port.
    int bind(const std::string& host, int port);
    // Serves until stop(); call after bind.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace biorag
