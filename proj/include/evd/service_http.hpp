#pragma once

#include <string>

#include "evd/session.hpp"

namespace httplib {
class Server;
}

namespace evd {

/// Applies EVD_LOG=error|info|debug to the default logger (info when unset).
void configure_logging_from_env();

/// Routes /api/v1/* to Session::handle and, when `ui_dir` is non-empty,
/// serves it as static files at "/".
void install_routes(httplib::Server& server, Session& session, const std::string& ui_dir);

/// Blocks serving on host:port until the server is stopped. Returns false
/// if the socket could not be bound.
bool serve(Session& session, const std::string& host, int port, const std::string& ui_dir);

}  // namespace evd
