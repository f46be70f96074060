#pragma once

/**
 * @file service.hpp
 * @brief JSON-over-HTTP facade for interactive what-if exploration.
 *
 * Endpoints:
 *   GET  /api/health
 *   POST /api/scenario   CSV text, or a JSON synthetic spec -> {scenario_id, n_t, n_d}
 *   POST /api/solve      {scenario_id, params?, with_lp?, lp_timeout_s?}
 *   POST /api/sweep      {scenario_id, sweep_spec} -> rows streamed in a chunked body
 *
 * The request handlers are plain functions over a ScenarioStore so they can be
 * exercised without a socket; install_routes() wires them into cpp-httplib.
 * All numbers in response bodies are rounded to 6 significant digits.
 */

#include <cstdint>
#include <cstdio>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "pvscm/domain.hpp"
#include "pvscm/ingest.hpp"
#include "pvscm/json_io.hpp"
#include "pvscm/lp/oracle.hpp"
#include "pvscm/scm.hpp"
#include "pvscm/sensitivity.hpp"

// After the Eigen-based headers: <resolv.h>, pulled in by httplib, defines a
// `_res` macro that clashes with Eigen parameter names.
#include <httplib.h>

namespace pvscm::service {

/// Bounded in-memory scenario store with least-recently-used eviction.
/// Evicted ids are remembered so that later lookups can say "gone" rather
/// than "never existed".
class ScenarioStore {
public:
    enum class Lookup { Found, Evicted, Unknown };

    explicit ScenarioStore(std::size_t capacity = 64) : capacity_(capacity == 0 ? 1 : capacity) {
        std::random_device rd;
        salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }

    std::string insert(Scenario s) {
        std::lock_guard lock(mu_);
        std::string id = make_id();
        lru_.push_front(id);
        entries_.emplace(id, Entry{std::make_shared<const Scenario>(std::move(s)), lru_.begin()});
        while (entries_.size() > capacity_) {
            const std::string victim = lru_.back();
            lru_.pop_back();
            entries_.erase(victim);
            evicted_.insert(victim);
        }
        return id;
    }

    std::pair<Lookup, std::shared_ptr<const Scenario>> get(const std::string& id) {
        std::lock_guard lock(mu_);
        auto it = entries_.find(id);
        if (it == entries_.end()) return {evicted_.count(id) ? Lookup::Evicted : Lookup::Unknown, nullptr};
        lru_.splice(lru_.begin(), lru_, it->second.position);
        return {Lookup::Found, it->second.scenario};
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return entries_.size();
    }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    struct Entry {
        std::shared_ptr<const Scenario> scenario;
        std::list<std::string>::iterator position;
    };

    std::string make_id() {
        // splitmix64 over a per-store salt and a counter: unique and opaque.
        std::uint64_t z = salt_ + 0x9E3779B97F4A7C15ULL * ++counter_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        char buf[24];
        std::snprintf(buf, sizeof buf, "sc-%016llx", static_cast<unsigned long long>(z));
        return buf;
    }

    std::size_t capacity_;
    mutable std::mutex mu_;
    std::list<std::string> lru_;
    std::unordered_map<std::string, Entry> entries_;
    std::unordered_set<std::string> evicted_;
    std::uint64_t salt_ = 0;
    std::uint64_t counter_ = 0;
};

struct Response {
    int status = 200;
    nlohmann::json body;

    std::string text() const { return rounded(body).dump(); }
};

inline Response error_response(int status, const std::string& error, const std::string& message) {
    return {status, {{"error", error}, {"message", message}}};
}

inline Response error_response(const InputError& e) { return {400, error_json(e)}; }

inline std::optional<nlohmann::json> parse_body(const std::string& body, Response& err) {
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        err = error_response(400, "ParseError", std::string("request body is not valid JSON: ") + e.what());
        return std::nullopt;
    }
}

/// Looks up the scenario named by body["scenario_id"]; fills `err` on failure.
inline std::shared_ptr<const Scenario> find_scenario(ScenarioStore& store, const nlohmann::json& body,
                                                     Response& err) {
    if (!body.is_object() || !body.contains("scenario_id") || !body["scenario_id"].is_string()) {
        err = error_response(400, "InvalidParameter", "request needs a string 'scenario_id'");
        return nullptr;
    }
    const auto id = body["scenario_id"].get<std::string>();
    auto [state, scenario] = store.get(id);
    switch (state) {
        case ScenarioStore::Lookup::Found: return scenario;
        case ScenarioStore::Lookup::Evicted:
            err = error_response(410, "ScenarioEvicted", "scenario '" + id + "' was evicted from the store");
            return nullptr;
        case ScenarioStore::Lookup::Unknown: break;
    }
    err = error_response(404, "UnknownScenario", "no scenario with id '" + id + "'");
    return nullptr;
}

inline Response handle_health(const ScenarioStore& store) {
    return {200, {{"status", "ok"}, {"scenarios", store.size()}, {"capacity", store.capacity()}}};
}

/// A body whose first non-blank character is '{' is read as a synthetic spec,
/// anything else as CSV.
inline Response handle_scenario(ScenarioStore& store, const std::string& body, const ColumnMap& columns = {}) {
    try {
        const auto first = body.find_first_not_of(" \t\r\n");
        const bool json = first != std::string::npos && body[first] == '{';
        Scenario s = json ? generate_synthetic(parse_synthetic_spec(body)) : parse_csv(body, columns);
        const auto n_t = s.n_t();
        const auto n_d = s.n_d();
        const auto id = store.insert(std::move(s));
        return {200, {{"scenario_id", id}, {"n_t", n_t}, {"n_d", n_d}}};
    } catch (const InputError& e) {
        return error_response(e);
    }
}

inline Response handle_solve(ScenarioStore& store, const std::string& body_text) {
    Response err;
    const auto body = parse_body(body_text, err);
    if (!body) return err;
    const auto scenario = find_scenario(store, *body, err);
    if (!scenario) return err;
    try {
        const auto params = params_from_json(body->value("params", nlohmann::json()));
        const bool with_lp = body->value("with_lp", false);
        const double lp_timeout = body->value("lp_timeout_s", 30.0);
        if (!(lp_timeout > 0.0)) throw InputError(ErrorKind::InvalidParameter, "lp_timeout_s must be > 0");

        const auto r = run_scm(*scenario, params);
        Response res;
        res.body = {{"scenario_id", (*body)["scenario_id"]},
                    {"params", params},
                    {"viable", viability(params)},
                    {"sizing", sizing_json(r.sizing)},
                    {"curves", curves_json(r.curves)},
                    {"profile", profile_json(r.sizing)}};
        if (with_lp) {
            lp::SimplexOptions opt;
            opt.time_limit_s = lp_timeout;
            const auto sol = lp::solve_sizing(*scenario, params, opt);
            // Wall time is left out so identical requests give identical bodies.
            nlohmann::json l{{"status", lp::to_string(sol.status)}, {"iterations", sol.iterations}};
            if (sol.optimal()) {
                l["v_pv_kw"] = sol.v_pv;
                l["v_bat_kwh"] = sol.v_bat;
                l["objective"] = sol.objective;
            }
            res.body["lp"] = l;
            if (sol.status == lp::SolveStatus::TimeLimit) {
                res.status = 504;
                res.body["error"] = "LpTimeout";
                res.body["message"] = "LP did not finish within lp_timeout_s; SCM results are included";
            } else if (!sol.optimal()) {
                res.status = 500;
                res.body["error"] = "LpFailed";
                res.body["message"] = sol.message;
            }
        }
        return res;
    } catch (const InputError& e) {
        return error_response(e);
    } catch (const nlohmann::json::exception& e) {
        return error_response(400, "InvalidParameter", e.what());
    }
}

/// Validated sweep request, ready to run.
struct SweepRequest {
    std::shared_ptr<const Scenario> scenario;
    SweepSpec spec;
};

inline std::optional<SweepRequest> prepare_sweep(ScenarioStore& store, const std::string& body_text, Response& err) {
    const auto body = parse_body(body_text, err);
    if (!body) return std::nullopt;
    auto scenario = find_scenario(store, *body, err);
    if (!scenario) return std::nullopt;
    try {
        if (!body->contains("sweep_spec")) throw InputError(ErrorKind::InvalidParameter, "request needs 'sweep_spec'");
        auto spec = sweep_spec_from_json((*body)["sweep_spec"]);
        if (spec.parallelism == 0) spec.parallelism = 1;
        return SweepRequest{std::move(scenario), std::move(spec)};
    } catch (const InputError& e) {
        err = error_response(e);
        return std::nullopt;
    }
}

inline nlohmann::json sweep_row_json(const SweepRow& row) {
    auto j = to_json(row);
    if (j.contains("scm")) j["scm"].erase("seconds");
    if (j.contains("lp")) j["lp"].erase("seconds");
    return rounded(j);
}

/// Whole sweep as one (non-streamed) response; used by tests and small sweeps.
inline Response handle_sweep(ScenarioStore& store, const std::string& body_text) {
    Response err;
    auto req = prepare_sweep(store, body_text, err);
    if (!req) return err;
    const auto result = run_sweep(*req->scenario, req->spec);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : result.rows) rows.push_back(sweep_row_json(row));
    return {200, {{"parameter", to_string(result.parameter)}, {"rows", rows}}};
}

struct ServerOptions {
    std::size_t store_capacity = 64;
    std::string static_dir;  ///< served at "/" when non-empty
};

inline void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.text(), "application/json");
}

/// Registers all routes on `server`. `store` must outlive the server.
inline void install_routes(httplib::Server& server, ScenarioStore& store, const ServerOptions& opt = {}) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/api/health", [&store](const httplib::Request&, httplib::Response& res) {
        send(res, handle_health(store));
    });
    server.Post("/api/scenario", [&store](const httplib::Request& req, httplib::Response& res) {
        ColumnMap cols;
        if (req.has_param("demand_col")) cols.demand = req.get_param_value("demand_col");
        if (req.has_param("irr_col")) cols.irradiation = req.get_param_value("irr_col");
        if (req.has_param("day_col")) cols.day = req.get_param_value("day_col");
        send(res, handle_scenario(store, req.body, cols));
    });
    server.Post("/api/solve", [&store](const httplib::Request& req, httplib::Response& res) {
        send(res, handle_solve(store, req.body));
    });
    server.Post("/api/sweep", [&store](const httplib::Request& req, httplib::Response& res) {
        Response err;
        auto prepared = prepare_sweep(store, req.body, err);
        if (!prepared) {
            send(res, err);
            return;
        }
        auto shared = std::make_shared<SweepRequest>(std::move(*prepared));
        res.status = 200;
        res.set_chunked_content_provider("application/json", [shared](std::size_t, httplib::DataSink& sink) {
            try {
                const std::string head =
                    std::string(R"({"parameter":")") + to_string(shared->spec.parameter) + R"(","rows":[)";
                sink.write(head.data(), head.size());
                run_sweep(*shared->scenario, shared->spec, [&sink](std::size_t i, const SweepRow& row) {
                    const std::string chunk = (i ? "," : "") + sweep_row_json(row).dump();
                    if (!sink.write(chunk.data(), chunk.size())) throw std::runtime_error("client disconnected");
                });
                const std::string tail = "]}";
                sink.write(tail.data(), tail.size());
                sink.done();
                return true;
            } catch (const std::exception&) {
                return false;
            }
        });
    });
    if (!opt.static_dir.empty()) server.set_mount_point("/", opt.static_dir);
}

}  // namespace pvscm::service
