#pragma once

// Registry of extractions. Each registered document gets a content-derived
// identifier; records are appended to a JSON-lines journal and replayed on
// start-up.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xsams/model.hpp"
#include "xsams/node.hpp"

namespace xsams::store {

struct VersionStamp {
  std::string version_id;
  std::string timestamp;

  friend bool operator==(const VersionStamp&, const VersionStamp&) = default;
};

struct ExtractionRecord {
  std::string identifier;
  std::string node_origin_identifier;
  std::string node_name;
  std::string canonical_query;
  std::string extraction_timestamp;
  std::vector<VersionStamp> version_ids;
  std::string content_digest;
  std::string bibtex_blob;
  std::optional<std::string> stored_document_path;
  bool reexecutable = false;

  friend bool operator==(const ExtractionRecord&, const ExtractionRecord&) = default;
};

nlohmann::json to_json(const ExtractionRecord& r);
ExtractionRecord record_from_json(const nlohmann::json& j);

// "vamdc-qs:" followed by the first 16 hex digits of SHA-256 over the four
// fields joined by U+001F.
std::string make_identifier(std::string_view node_origin_identifier,
                            std::string_view canonical_query,
                            std::string_view extraction_timestamp,
                            std::string_view content_digest);

struct StoreOptions {
  std::filesystem::path journal_path;
  bool retain_documents = true;  // copies go to <journal dir>/documents/
};

struct ReexecuteResult {
  XsamsDocument document;
  bool match = false;
  std::string digest;
};

class QueryStore {
 public:
  // Replays the journal; a torn final line is ignored. Throws StorageFailure.
  explicit QueryStore(StoreOptions options);

  // Throws InvalidDocument or StorageFailure. Registering the same
  // extraction again returns the stored record.
  ExtractionRecord register_document(const XsamsDocument& doc);

  // Throws UnknownIdentifier.
  ExtractionRecord resolve(const std::string& identifier) const;
  std::string landing_page(const std::string& identifier) const;
  std::string landing_record(const std::string& identifier) const;

  // Throws UnknownIdentifier, NotReexecutable, NodeUnavailable.
  ReexecuteResult reexecute(const std::string& identifier, node::NodeHandle& node,
                            const Timestamp& now) const;

  std::size_t size() const;
  const StoreOptions& options() const { return options_; }

 private:
  using Snapshot = std::map<std::string, ExtractionRecord>;

  std::shared_ptr<const Snapshot> snapshot() const;

  StoreOptions options_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::mutex write_mutex_;
};

// HTML page for a record, derived from the record alone.
std::string render_landing_page(const ExtractionRecord& record);
std::string render_not_found(const std::string& identifier);

// Blocking HTTP service. Nodes are looked up by origin identifier for
// /reexecute. Returns false if binding fails.
bool serve(QueryStore& store, std::vector<std::shared_ptr<node::NodeHandle>> nodes,
           const std::string& host, int port);

}  // namespace xsams::store
