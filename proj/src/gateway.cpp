#include "slapick/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "slapick/budget.hpp"
#include "slapick/netmodel.hpp"
#include "slapick/policy.hpp"
#include "slapick/rng.hpp"

namespace slapick {

namespace {

using nlohmann::json;

double epoch_now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump(),
                    "application/json");
}

// Thrown by field extraction; carries the wire error code.
struct RequestError : std::runtime_error {
    int status;
    std::string code;
    RequestError(int status_, std::string code_, const std::string& message)
        : std::runtime_error(message), status(status_), code(std::move(code_)) {}
};

double require_number(const json& body, const char* key) {
    if (!body.contains(key)) {
        throw RequestError(400, "missing_field", std::string("missing field: ") + key);
    }
    if (!body[key].is_number()) {
        throw RequestError(400, "invalid_field", std::string(key) + " must be a number");
    }
    return body[key].get<double>();
}

std::string require_string(const json& body, const char* key) {
    if (!body.contains(key)) {
        throw RequestError(400, "missing_field", std::string("missing field: ") + key);
    }
    if (!body[key].is_string()) {
        throw RequestError(400, "invalid_field", std::string(key) + " must be a string");
    }
    return body[key].get<std::string>();
}

std::optional<double> optional_number(const json& body, const char* key) {
    if (!body.contains(key)) return std::nullopt;
    if (!body[key].is_number()) {
        throw RequestError(400, "invalid_field", std::string(key) + " must be a number");
    }
    return body[key].get<double>();
}

std::optional<std::string> optional_string(const json& body, const char* key) {
    if (!body.contains(key)) return std::nullopt;
    if (!body[key].is_string()) {
        throw RequestError(400, "invalid_field", std::string(key) + " must be a string");
    }
    return body[key].get<std::string>();
}

}  // namespace

struct Gateway::Impl {
    GatewayConfig cfg;
    httplib::Server server;
    std::thread serve_thread;
    bool bound = false;
    int bound_port = -1;

    // Guards everything below. The stub sleep runs outside the lock.
    std::mutex mu;
    Registry registry;
    std::unordered_map<std::string, std::mt19937_64> exec_rng;
    std::mt19937_64 policy_rng;
    std::mt19937_64 correct_rng;
    std::unordered_map<std::string, std::uint64_t> usage;
    std::uint64_t total_requests = 0;
    std::uint64_t sla_met = 0;
    std::uint64_t sla_missed = 0;
    std::uint64_t next_request_no = 0;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    explicit Impl(GatewayConfig c)
        : cfg(std::move(c)),
          registry(cfg.ewma_alpha),
          policy_rng(make_stream(cfg.seed, "policy")),
          correct_rng(make_stream(cfg.seed, "correct")) {}

    double steady_now_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         t0)
            .count();
    }

    // Caller holds mu. Probe draws profile an unseeded model without sleeping.
    void warm_if_unseeded(const PoolModel& m) {
        if (m.seed_mean_ms) return;
        auto& rng = exec_rng.at(m.id);
        auto dist = registry.true_latency(m.id);
        for (int i = 0; i < cfg.warmup_count; ++i) {
            registry.record_observation(m.id, sample(dist, rng), 0.0);
        }
    }

    // Caller holds mu.
    void add_model(const PoolModel& m) {
        registry.register_model(ModelSpec{m.id, m.accuracy, m.true_latency()}, m.seed());
        exec_rng.emplace(m.id, make_stream(cfg.seed, "exec:" + m.id));
        usage.emplace(m.id, 0);
        warm_if_unseeded(m);
    }

    json model_entry(const SnapshotEntry& e) const {
        return json{{"id", e.id},
                    {"accuracy", e.accuracy},
                    {"mean_ms", e.profile.has_estimate() ? e.profile.mean_ms : 0.0},
                    {"std_ms", e.profile.has_estimate() ? e.profile.std_ms() : 0.0},
                    {"sample_count", e.profile.sample_count}};
    }

    void handle_infer(const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            send_error(res, 400, "bad_json", e.what());
            return;
        }
        if (!body.is_object()) {
            send_error(res, 400, "bad_json", "request body must be a JSON object");
            return;
        }

        double sla_ms = 0.0, start_ts = 0.0;
        std::optional<std::string> request_id, truth_label;
        try {
            sla_ms = require_number(body, "sla_ms");
            start_ts = require_number(body, "client_start_ts_ms");
            if (!(sla_ms > 0.0)) {
                throw RequestError(400, "invalid_field", "sla_ms must be positive");
            }
            if (!(start_ts > 0.0)) {
                throw RequestError(400, "invalid_field",
                                   "client_start_ts_ms must be positive");
            }
            request_id = optional_string(body, "request_id");
            truth_label = optional_string(body, "truth_label");
            optional_string(body, "payload_b64");  // accepted, size only; never decoded
        } catch (const RequestError& e) {
            send_error(res, e.status, e.code, e.what());
            return;
        }

        double t_input = cfg.fixed_input_ms
                             ? *cfg.fixed_input_ms
                             : std::max(0.0, epoch_now_ms() - start_ts);
        TimeBudget budget =
            make_time_budget(sla_ms, t_input, cfg.threshold_ms, cfg.t_on_device_ms);

        SelectionDecision decision;
        double exec_ms = 0.0;
        std::string label = "class_0";
        double sel_mean = 0.0, sel_std = 0.0;
        std::string rid;
        LatencyDistribution dist;
        {
            std::lock_guard lock(mu);
            if (registry.size() == 0) {
                send_error(res, 503, "no_models", "no models registered");
                return;
            }
            rid = request_id ? *request_id : "req-" + std::to_string(next_request_no);
            ++next_request_no;
            ProfileSnapshot snap = registry.snapshot(steady_now_ms());
            decision = select_modipick(snap, budget, policy_rng);
            for (const auto& e : snap.entries) {
                if (e.id == decision.model_id) {
                    sel_mean = e.profile.mean_ms;
                    sel_std = e.profile.std_ms();
                    break;
                }
            }
            dist = registry.true_latency(decision.model_id);
            exec_ms = sample(dist, exec_rng.at(decision.model_id));
            if (truth_label) {
                bool correct =
                    uniform01(correct_rng) < registry.accuracy(decision.model_id);
                label = correct ? *truth_label : "misclassified";
            }
        }

        // Real wall-clock execution so client-side latency measurements mean
        // something. No lock held: parallel requests sleep in parallel.
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(exec_ms));

        {
            std::lock_guard lock(mu);
            registry.record_observation(decision.model_id, exec_ms, steady_now_ms());
            ++usage[decision.model_id];
            ++total_requests;
            double estimated_e2e = 2.0 * t_input + exec_ms;
            if (estimated_e2e <= sla_ms) {
                ++sla_met;
            } else {
                ++sla_missed;
            }
        }

        json out{{"request_id", rid},
                 {"model_used", decision.model_id},
                 {"label", label},
                 {"path", to_string(decision.path)},
                 {"server_exec_ms", exec_ms},
                 {"t_input_est_ms", budget.t_input_ms},
                 {"t_budget_ms", budget.t_budget_ms},
                 // Believed profile at selection time, so clients and tests can
                 // audit the mean+std < T_U safety condition per response.
                 {"model_mean_ms", sel_mean},
                 {"model_std_ms", sel_std}};
        res.set_content(out.dump(), "application/json");
    }

    void handle_list_models(httplib::Response& res) {
        json out = json::array();
        std::lock_guard lock(mu);
        ProfileSnapshot snap = registry.snapshot(steady_now_ms());
        for (const auto& e : snap.entries) out.push_back(model_entry(e));
        res.set_content(out.dump(), "application/json");
    }

    void handle_register_model(const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            send_error(res, 400, "bad_json", e.what());
            return;
        }
        PoolModel m;
        try {
            m.id = require_string(body, "id");
            m.accuracy = require_number(body, "accuracy");
            m.true_mean_ms = require_number(body, "true_mean_ms");
            m.true_std_ms = require_number(body, "true_std_ms");
            m.seed_mean_ms = optional_number(body, "seed_mean_ms");
            m.seed_std_ms = optional_number(body, "seed_std_ms");
        } catch (const RequestError& e) {
            send_error(res, e.status, e.code, e.what());
            return;
        }
        std::lock_guard lock(mu);
        if (registry.contains(m.id)) {
            send_error(res, 409, "duplicate_model", "model already registered: " + m.id);
            return;
        }
        try {
            add_model(m);
        } catch (const std::exception& e) {
            send_error(res, 400, "invalid_field", e.what());
            return;
        }
        ProfileSnapshot snap = registry.snapshot(steady_now_ms());
        res.status = 201;
        res.set_content(model_entry(snap.entries.back()).dump(), "application/json");
    }

    void handle_metrics(httplib::Response& res) {
        std::lock_guard lock(mu);
        ProfileSnapshot snap = registry.snapshot(steady_now_ms());
        json per_model = json::object();
        for (const auto& e : snap.entries) {
            json entry = model_entry(e);
            entry["usage"] = usage.at(e.id);
            per_model[e.id] = entry;
        }
        json out{{"per_model", per_model},
                 {"total_requests", total_requests},
                 {"sla_met", sla_met},
                 {"sla_missed", sla_missed}};
        res.set_content(out.dump(), "application/json");
    }

    void handle_reset(httplib::Response& res) {
        std::lock_guard lock(mu);
        registry.reset_profiles();
        // Re-warm models left without an estimate, so the normal selection
        // path stays reachable.
        ProfileSnapshot snap = registry.snapshot(steady_now_ms());
        for (const auto& e : snap.entries) {
            if (e.profile.has_estimate()) continue;
            auto& rng = exec_rng.at(e.id);
            auto dist = registry.true_latency(e.id);
            for (int i = 0; i < cfg.warmup_count; ++i) {
                registry.record_observation(e.id, sample(dist, rng), 0.0);
            }
        }
        res.status = 204;
    }

    void install_routes() {
        server.Post("/v1/infer", [this](const httplib::Request& req,
                                        httplib::Response& res) { handle_infer(req, res); });
        server.Get("/v1/models", [this](const httplib::Request&, httplib::Response& res) {
            handle_list_models(res);
        });
        server.Post("/v1/models",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        handle_register_model(req, res);
                    });
        server.Get("/v1/metrics", [this](const httplib::Request&, httplib::Response& res) {
            handle_metrics(res);
        });
        server.Post("/v1/profiles/reset",
                    [this](const httplib::Request&, httplib::Response& res) {
                        handle_reset(res);
                    });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                        std::exception_ptr ep) {
            std::string message = "internal error";
            try {
                if (ep) std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                message = e.what();
            } catch (...) {
            }
            send_error(res, 500, "internal", message);
        });
    }
};

Gateway::Gateway(const std::vector<PoolModel>& models, GatewayConfig cfg)
    : impl_(std::make_unique<Impl>(std::move(cfg))) {
    {
        std::lock_guard lock(impl_->mu);
        for (const auto& m : models) impl_->add_model(m);
    }
    impl_->install_routes();
}

Gateway::~Gateway() { stop(); }

bool Gateway::bind() {
    if (impl_->bound) return true;
    // Allow quick restarts on a lingering TIME_WAIT socket, but never share a
    // live port: a second gateway on the same port must fail to bind instead
    // of silently splitting traffic (the library default enables that).
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                     reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    if (impl_->cfg.port == 0) {
        int p = impl_->server.bind_to_any_port(impl_->cfg.host);
        if (p <= 0) return false;
        impl_->bound_port = p;
    } else {
        if (!impl_->server.bind_to_port(impl_->cfg.host, impl_->cfg.port)) return false;
        impl_->bound_port = impl_->cfg.port;
    }
    impl_->bound = true;
    return true;
}

int Gateway::port() const { return impl_->bound_port; }

bool Gateway::run() {
    if (!bind()) return false;
    return impl_->server.listen_after_bind();
}

bool Gateway::start() {
    if (!bind()) return false;
    impl_->serve_thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return true;
}

void Gateway::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
    if (impl_->serve_thread.joinable()) impl_->serve_thread.join();
}

const GatewayConfig& Gateway::config() const { return impl_->cfg; }

}  // namespace slapick
