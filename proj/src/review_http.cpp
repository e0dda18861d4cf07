#include <httplib.h>

#include "shrg/error.hpp"
#include "shrg/review.hpp"

namespace shrg::review {

namespace {

void reply(httplib::Response &res, const Response &r) {
    res.status = r.status;
    res.set_content(dump(r.body), "application/json");
}

std::string param(const httplib::Request &req, const char *key) {
    return req.has_param(key) ? req.get_param_value(key) : std::string();
}

} // namespace

void install_routes(httplib::Server &srv, ReviewStore &store) {
    srv.Get("/items", [&](const httplib::Request &req, httplib::Response &res) {
        reply(res, store.list_items(param(req, "status"), param(req, "source"), param(req, "page")));
    });
    srv.Get(R"(/items/([^/]+))", [&](const httplib::Request &req, httplib::Response &res) {
        reply(res, store.get_item(req.matches[1]));
    });
    srv.Post(R"(/items/([^/]+)/label)", [&](const httplib::Request &req, httplib::Response &res) {
        reply(res, store.label(req.matches[1], req.body));
    });
    srv.Post(R"(/items/([^/]+)/rebuild)", [&](const httplib::Request &req, httplib::Response &res) {
        reply(res, store.rebuild(req.matches[1], req.body));
    });
    srv.Get("/rules", [&](const httplib::Request &req, httplib::Response &res) {
        reply(res, store.search_rules(param(req, "signature"), param(req, "q")));
    });
    srv.Post("/preview/compose", [&](const httplib::Request &req, httplib::Response &res) {
        reply(res, store.preview(req.body));
    });
    srv.Get("/reports/iaa", [&](const httplib::Request &, httplib::Response &res) { reply(res, store.iaa()); });
    srv.Get("/reports/corpus", [&](const httplib::Request &, httplib::Response &res) { reply(res, store.corpus()); });
    srv.set_exception_handler([](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
        std::string msg = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception &e) {
            msg = e.what();
        } catch (...) {
        }
        reply(res, Response{500, Json{{"error", msg}}});
    });
    srv.set_error_handler([](const httplib::Request &, httplib::Response &res) {
        if (res.body.empty())
            reply(res, Response{res.status, Json{{"error", "no such endpoint"}}});
    });
}

std::pair<std::string, int> parse_bind(const std::string &bind) {
    auto colon = bind.rfind(':');
    if (colon == std::string::npos || colon == 0)
        throw ValidationError("bind address must look like HOST:PORT, got '" + bind + "'");
    auto host = bind.substr(0, colon);
    auto port_s = bind.substr(colon + 1);
    std::size_t used = 0;
    int port = -1;
    try {
        port = std::stoi(port_s, &used);
    } catch (const std::exception &) {
    }
    if (used != port_s.size() || port < 0 || port > 65535)
        throw ValidationError("bad port in bind address '" + bind + "'");
    return {host, port};
}

bool serve(ReviewStore &store, const std::string &host, int port) {
    httplib::Server srv;
    install_routes(srv, store);
    return srv.listen(host, port);
}

} // namespace shrg::review
