#include "evd/service_http.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/spdlog.h>

#include "httplib.h"

namespace evd {

void configure_logging_from_env() {
  const char* level = std::getenv("EVD_LOG");
  const std::string_view v = level ? level : "info";
  if (v == "error")
    spdlog::set_level(spdlog::level::err);
  else if (v == "debug")
    spdlog::set_level(spdlog::level::debug);
  else
    spdlog::set_level(spdlog::level::info);
}

void install_routes(httplib::Server& server, Session& session, const std::string& ui_dir) {
  auto dispatch = [&session](const httplib::Request& req, httplib::Response& res) {
    Request r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    const Response out = session.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
    if (out.status >= 400)
      spdlog::info("{} {} -> {}", req.method, req.path, out.status);
    else
      spdlog::debug("{} {} -> {}", req.method, req.path, out.status);
  };
  const std::string pattern = R"(/api/v1/.*)";
  server.Get(pattern, dispatch);
  server.Put(pattern, dispatch);
  server.Post(pattern, dispatch);
  server.Delete(pattern, dispatch);
  if (!ui_dir.empty() && !server.set_mount_point("/", ui_dir))
    spdlog::error("UI directory '{}' does not exist; static serving disabled", ui_dir);
}

bool serve(Session& session, const std::string& host, int port, const std::string& ui_dir) {
  httplib::Server server;
  install_routes(server, session, ui_dir);
  spdlog::info("serving on http://{}:{}/ ({} event(s), {} filter(s))", host, port, session.events().events.size(),
               session.filters().size());
  if (!server.listen(host, port)) {
    spdlog::error("cannot listen on {}:{}", host, port);
    return false;
  }
  return true;
}

}  // namespace evd
