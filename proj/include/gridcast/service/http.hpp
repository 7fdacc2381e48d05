#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "gridcast/core/error.hpp"
#include "gridcast/service/service.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>

namespace gridcast::service {

namespace detail {

inline std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
}

inline std::optional<Timestamp> time_param(const httplib::Request& req, const char* name) {
    auto v = param(req, name);
    if (!v) return std::nullopt;
    try {
        return parse_timestamp(*v);
    } catch (const DataError&) {
        throw ValidationError(std::string("parameter '") + name + "' is not YYYY-MM-DDTHH:00:00");
    }
}

inline Timestamp required_time(const httplib::Request& req, const char* name) {
    auto t = time_param(req, name);
    if (!t) throw ValidationError(std::string("missing parameter '") + name + "'");
    return *t;
}

inline std::string required(const httplib::Request& req, const char* name) {
    auto v = param(req, name);
    if (!v || v->empty()) throw ValidationError(std::string("missing parameter '") + name + "'");
    return *v;
}

inline std::size_t count_param(const httplib::Request& req, const char* name, std::size_t fallback) {
    auto v = param(req, name);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const long n = std::stol(*v, &used);
        if (used != v->size() || n < 0) throw std::invalid_argument("negative");
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw ValidationError(std::string("parameter '") + name + "' must be a non-negative integer");
    }
}

inline double number_param(const httplib::Request& req, const char* name, double fallback) {
    auto v = param(req, name);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const double d = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ValidationError(std::string("parameter '") + name + "' must be a number");
    }
}

inline void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

/// Runs a handler and maps library errors onto HTTP status codes.
inline void guarded(httplib::Response& res, const std::function<json()>& fn, int ok = 200) {
    try {
        reply(res, ok, fn());
    } catch (const NotFound& e) {
        reply(res, 404, {{"error", e.what()}});
    } catch (const Conflict& e) {
        reply(res, 409, {{"error", e.what()}});
    } catch (const ValidationError& e) {
        reply(res, 400, {{"error", e.what()}});
    } catch (const DataError& e) {
        reply(res, 400, {{"error", e.what()}});
    } catch (const json::exception& e) {
        reply(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}});
    }
}

inline SeriesId series_from_path(const httplib::Request& req) {
    Level level;
    try {
        level = parse_level(req.matches[1].str());
    } catch (const Error&) {
        throw NotFound("unknown level '" + req.matches[1].str() + "'");
    }
    return {req.matches[2].str(), level};
}

}  // namespace detail

/// HTTP routes of the JSON API. `ui_dir`, when set, is served at /.
inline std::unique_ptr<httplib::Server> make_http_server(Service& svc, const std::optional<std::string>& ui_dir = {}) {
    using detail::guarded;
    auto srv = std::make_unique<httplib::Server>();
    auto& s = *srv;

    s.Get("/v1/health", [&svc](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { return svc.health(); });
    });
    s.Get("/v1/series", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return svc.series(detail::param(req, "model")); });
    });
    s.Get(R"(/v1/forecast/(utility|bus|[^/]+)/([^/]+)/components)",
          [&svc](const httplib::Request& req, httplib::Response& res) {
              guarded(res, [&] {
                  return svc.components(detail::series_from_path(req), detail::required_time(req, "origin"),
                                        detail::param(req, "model"));
              });
          });
    s.Get(R"(/v1/forecast/utility/([^/]+)/adjusted)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            return svc.adjusted(req.matches[1].str(), detail::required_time(req, "origin"), {},
                                detail::param(req, "model"));
        });
    });
    s.Post(R"(/v1/forecast/utility/([^/]+)/adjusted)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = json::parse(req.body);
            std::vector<AdjustmentRecord> drafts;
            if (body.contains("drafts")) {
                for (const auto& d : body.at("drafts")) drafts.push_back(decode_adjustment(d));
            }
            std::optional<Timestamp> origin = detail::time_param(req, "origin");
            if (!origin && body.contains("origin")) origin = parse_timestamp(body.at("origin").get<std::string>());
            if (!origin) throw ValidationError("missing origin");
            return svc.adjusted(req.matches[1].str(), *origin, drafts, detail::param(req, "model"));
        });
    });
    s.Get(R"(/v1/forecast/([^/]+)/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            return svc.forecast(detail::series_from_path(req), detail::required_time(req, "origin"),
                                detail::param(req, "model"));
        });
    });
    s.Get("/v1/diagnostics/attribution", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            return svc.attribution(detail::required(req, "utility"), detail::time_param(req, "from"),
                                   detail::time_param(req, "to"), detail::count_param(req, "top_n", 5),
                                   detail::param(req, "model"));
        });
    });
    s.Get("/v1/diagnostics/high-error", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            return svc.high_error(detail::required(req, "utility"), detail::time_param(req, "from"),
                                  detail::time_param(req, "to"), detail::number_param(req, "quantile", 0.10),
                                  detail::param(req, "model"));
        });
    });
    s.Post("/v1/adjustments", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return svc.post_adjustment(json::parse(req.body)); }, 201);
    });
    s.Get("/v1/adjustments", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return svc.list_adjustments(detail::time_param(req, "active_at")); });
    });

    s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    if (ui_dir) s.set_mount_point("/", *ui_dir);
    return srv;
}

}  // namespace gridcast::service
