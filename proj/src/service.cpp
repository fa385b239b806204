#include "biorag/service.hpp"

#include "httplib.h"
#include "json.hpp"

namespace biorag {

namespace {

std::string trim_copy(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\n\r\f\v");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\n\r\f\v");
    return s.substr(begin, end - begin + 1);
}

void reply_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

struct AskService::Impl {
    Engine& engine;
    httplib::Server server;

    explicit Impl(Engine& e) : engine(e) {
        server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
            reply_json(res, 200, {{"status", "ok"}});
        });

        server.Post("/v1/ask", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) {
                reply_json(res, 400, {{"error", "request body must be a JSON object"}});
                return;
            }
            AskRequest ask;
            ask.question = body.value("question", std::string());
            if (trim_copy(ask.question).empty()) {
                reply_json(res, 400, {{"error", "question must be nonempty"}});
                return;
            }
            if (body.contains("max_iterations")) {
                if (!body["max_iterations"].is_number_unsigned() ||
                    body["max_iterations"].get<uint64_t>() == 0) {
                    reply_json(res, 400, {{"error", "max_iterations must be a positive integer"}});
                    return;
                }
                ask.max_iterations = body["max_iterations"].get<uint32_t>();
            }
            if (body.contains("ablation")) {
                try {
                    ask.ablation = ablation_from_json(body["ablation"]);
                } catch (const Error& e) {
                    reply_json(res, 400, {{"error", e.what()}});
                    return;
                }
            }

            try {
                AskResponse answer = engine.handle_ask(ask);
                nlohmann::ordered_json out;
                out["answer"] = answer.answer;
                out["iterations"] = answer.iterations;
                out["exhausted"] = answer.exhausted;
                out["trace"] = answer.trace;
                reply_json(res, 200, out);
            } catch (const NotReadyError& e) {
                reply_json(res, 503, {{"error", e.what()}});
            } catch (const EmptyInputError& e) {
                reply_json(res, 400, {{"error", e.what()}});
            } catch (const std::exception& e) {
                reply_json(res, 500, {{"error", e.what()}});
            }
        });
    }
};

AskService::AskService(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}
AskService::~AskService() { stop(); }

int AskService::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

void AskService::run() { impl_->server.listen_after_bind(); }

void AskService::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace biorag
