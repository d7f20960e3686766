#pragma once

// Loaded detector, events and filters, shared by the CLI and the HTTP
// service so that both render scenes through the same code path.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evd/filter.hpp"
#include "evd/model.hpp"
#include "evd/scene.hpp"

namespace evd {

using ValuesMap = std::map<std::string, ParamValues>;  // filter name -> full value set

struct Request {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Immutable (detector, events, filter definitions) plus the one mutable
/// piece: the current parameter values, replaced as a whole map under a lock.
/// Readers take a snapshot and never observe a partial update.
class Session {
 public:
  /// Compiles every filter against the schemas plus the extras present in
  /// `events`. Throws DslError or evd::Error naming the filter.
  Session(DetectorModel detector, EventSet events, std::vector<FilterDef> filters);

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  [[nodiscard]] const DetectorModel& detector() const { return detector_; }
  [[nodiscard]] const EventSet& events() const { return events_; }
  [[nodiscard]] const std::vector<FilterDef>& filters() const { return filters_; }
  [[nodiscard]] const ExtraNames& extras() const { return extras_; }

  [[nodiscard]] std::shared_ptr<const ValuesMap> values() const;

  /// Merges `update` over the current values of `filter`. All-or-nothing:
  /// on any field error nothing changes and the errors are returned. Throws
  /// evd::Error for an unknown filter name.
  std::vector<FieldError> update_params(const std::string& filter, const ParamValues& update);

  /// Links in definition order; with `enabled` set, only the named filters
  /// are enabled. Throws evd::Error for unknown names in `enabled`.
  [[nodiscard]] FilterChain chain(const ValuesMap& values,
                                  const std::optional<std::set<std::string>>& enabled = std::nullopt) const;

  /// Event by its `index` field, or nullptr.
  [[nodiscard]] const Event* find_event(std::int64_t index) const;

  [[nodiscard]] Scene event_scene(const Event& event, const RenderOptions& options, const FilterChain& chain) const;

  /// Canonical scene.json bytes; the single render path behind `evd render
  /// --format scene` and GET /api/v1/events/{i}/scene.
  [[nodiscard]] std::string render_event_json(const Event& event, const RenderOptions& options,
                                              const FilterChain& chain) const;

  /// Dispatches one /api/v1 request. Safe to call concurrently.
  Response handle(const Request& request);

 private:
  Response route(const Request& request);

  DetectorModel detector_;
  EventSet events_;
  std::vector<FilterDef> filters_;
  std::vector<TypedExpr> compiled_;
  ExtraNames extras_;

  mutable std::mutex values_mutex_;
  std::shared_ptr<const ValuesMap> values_;
};

/// {code, message, detail} error body.
Response error_response(int status, const std::string& code, const std::string& message,
                        const std::string& detail = "");

}  // namespace evd
