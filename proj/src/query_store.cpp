#include "xsams/query_store.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

#include "xsams/bibtex.hpp"
#include "xsams/error.hpp"
#include "xsams/io.hpp"
#include "xsams/query.hpp"
#include "xsams/sha256.hpp"
#include "xsams/validator.hpp"

namespace xsams::store {

using nlohmann::json;

nlohmann::json to_json(const ExtractionRecord& r) {
  json versions = json::array();
  for (const auto& v : r.version_ids) {
    versions.push_back({{"version_id", v.version_id}, {"timestamp", v.timestamp}});
  }
  return {{"identifier", r.identifier},
          {"node_origin_identifier", r.node_origin_identifier},
          {"node_name", r.node_name},
          {"canonical_query", r.canonical_query},
          {"extraction_timestamp", r.extraction_timestamp},
          {"version_ids", versions},
          {"content_digest", r.content_digest},
          {"bibtex_blob", r.bibtex_blob},
          {"stored_document_path",
           r.stored_document_path ? json(*r.stored_document_path) : json(nullptr)},
          {"reexecutable", r.reexecutable}};
}

ExtractionRecord record_from_json(const nlohmann::json& j) {
  ExtractionRecord r;
  r.identifier = j.at("identifier").get<std::string>();
  r.node_origin_identifier = j.at("node_origin_identifier").get<std::string>();
  r.node_name = j.value("node_name", std::string());
  r.canonical_query = j.at("canonical_query").get<std::string>();
  r.extraction_timestamp = j.at("extraction_timestamp").get<std::string>();
  for (const auto& v : j.at("version_ids")) {
    r.version_ids.push_back({v.at("version_id").get<std::string>(), v.at("timestamp").get<std::string>()});
  }
  r.content_digest = j.at("content_digest").get<std::string>();
  r.bibtex_blob = j.at("bibtex_blob").get<std::string>();
  if (j.contains("stored_document_path") && !j.at("stored_document_path").is_null()) {
    r.stored_document_path = j.at("stored_document_path").get<std::string>();
  }
  r.reexecutable = j.at("reexecutable").get<bool>();
  return r;
}

std::string make_identifier(std::string_view node_origin_identifier,
                            std::string_view canonical_query,
                            std::string_view extraction_timestamp,
                            std::string_view content_digest) {
  std::string material;
  for (auto part : {node_origin_identifier, canonical_query, extraction_timestamp, content_digest}) {
    if (!material.empty()) material += '\x1f';
    material += part;
  }
  return "vamdc-qs:" + sha256_hex(material).substr(0, 16);
}

QueryStore::QueryStore(StoreOptions options) : options_(std::move(options)) {
  auto snapshot = std::make_shared<Snapshot>();
  std::ifstream in(options_.journal_path);
  if (in) {
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) lines.push_back(line);
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      try {
        auto record = record_from_json(json::parse(lines[i]));
        (*snapshot)[record.identifier] = std::move(record);
      } catch (const json::exception& e) {
        if (i + 1 == lines.size()) break;  // torn write at the tail
        throw Error(ErrorCode::StorageFailure, options_.journal_path.string(),
                    "journal line " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }
  snapshot_ = std::move(snapshot);
}

std::shared_ptr<const QueryStore::Snapshot> QueryStore::snapshot() const {
  return std::atomic_load(&snapshot_);
}

std::size_t QueryStore::size() const { return snapshot()->size(); }

ExtractionRecord QueryStore::register_document(const XsamsDocument& doc) {
  if (doc.origins.size() != 1) {
    throw Error(ErrorCode::InvalidDocument, "Origin",
                "expected exactly one root Origin, found " + std::to_string(doc.origins.size()));
  }
  auto report = validate(doc);
  if (!report.valid()) {
    const auto& first = report.errors.front();
    throw Error(ErrorCode::InvalidDocument, first.subject, first.code + ": " + first.message);
  }
  const Origin& origin = doc.origins.front();

  ExtractionRecord r;
  r.node_origin_identifier = origin.origin_identifier.value_or(origin.homepage_url);
  r.node_name = origin.name;
  r.extraction_timestamp = origin.timestamp.text;
  if (origin.kind == OriginKind::Node && origin.query) {
    try {
      r.canonical_query = query::render(query::parse_query(*origin.query));
      r.reexecutable = true;
    } catch (const Error&) {
      r.canonical_query = *origin.query;  // kept for the record, but cannot be replayed
    }
  }
  for (const auto* v : all_versions(doc)) r.version_ids.push_back({v->version_id, v->timestamp.text});
  r.content_digest = canonical_digest(doc);
  r.bibtex_blob = bibtex::doc_to_bibtex(doc);
  r.identifier = make_identifier(r.node_origin_identifier, r.canonical_query,
                                 r.extraction_timestamp, r.content_digest);

  std::lock_guard lock(write_mutex_);
  auto current = snapshot();
  if (auto it = current->find(r.identifier); it != current->end()) return it->second;

  try {
    if (options_.retain_documents) {
      auto dir = options_.journal_path.parent_path() / "documents";
      std::filesystem::create_directories(dir);
      auto file = dir / (r.identifier.substr(r.identifier.find(':') + 1) + ".xml");
      write_file(file.string(), serialize(doc));
      r.stored_document_path = file.string();
    }
    if (options_.journal_path.has_parent_path()) {
      std::filesystem::create_directories(options_.journal_path.parent_path());
    }
    std::ofstream out(options_.journal_path, std::ios::app | std::ios::binary);
    out << to_json(r).dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::StorageFailure, options_.journal_path.string(), "journal append failed");
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorCode::StorageFailure, e.path1().string(), e.what());
  }

  auto next = std::make_shared<Snapshot>(*current);
  (*next)[r.identifier] = r;
  std::atomic_store(&snapshot_, std::shared_ptr<const Snapshot>(std::move(next)));
  return r;
}

ExtractionRecord QueryStore::resolve(const std::string& identifier) const {
  auto current = snapshot();
  auto it = current->find(identifier);
  if (it == current->end()) throw Error(ErrorCode::UnknownIdentifier, identifier, "not registered");
  return it->second;
}

std::string QueryStore::landing_page(const std::string& identifier) const {
  return render_landing_page(resolve(identifier));
}

std::string QueryStore::landing_record(const std::string& identifier) const {
  return to_json(resolve(identifier)).dump(2);
}

ReexecuteResult QueryStore::reexecute(const std::string& identifier, node::NodeHandle& node,
                                      const Timestamp& now) const {
  auto record = resolve(identifier);
  if (!record.reexecutable) {
    throw Error(ErrorCode::NotReexecutable, identifier, "the extraction did not come from a single node query");
  }
  if (node.origin_identifier() != record.node_origin_identifier) {
    throw Error(ErrorCode::NodeUnavailable, record.node_origin_identifier,
                "handle given is for " + node.origin_identifier());
  }
  ReexecuteResult result;
  result.document = node.execute(query::parse_query(record.canonical_query), now);
  result.digest = canonical_digest(result.document);
  result.match = result.digest == record.content_digest;
  return result;
}

namespace {

std::string h(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_landing_page(const ExtractionRecord& r) {
  std::ostringstream o;
  o << "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>" << h(r.identifier)
    << "</title></head>\n<body>\n";
  o << "<h1>" << h(r.identifier) << "</h1>\n";
  o << "<dl>\n";
  o << "<dt>Resource</dt><dd>" << h(r.node_name) << "</dd>\n";
  o << "<dt>Origin identifier</dt><dd>" << h(r.node_origin_identifier) << "</dd>\n";
  if (!r.canonical_query.empty()) o << "<dt>Query</dt><dd><code>" << h(r.canonical_query) << "</code></dd>\n";
  o << "<dt>Extracted</dt><dd>" << h(r.extraction_timestamp) << "</dd>\n";
  o << "<dt>Content digest</dt><dd><code>" << h(r.content_digest) << "</code></dd>\n";
  o << "</dl>\n";
  o << "<h2>Data versions</h2>\n<table>\n<tr><th>Version</th><th>Published</th></tr>\n";
  for (const auto& v : r.version_ids) {
    o << "<tr><td>" << h(v.version_id) << "</td><td>" << h(v.timestamp) << "</td></tr>\n";
  }
  o << "</table>\n";
  o << "<h2>References</h2>\n<pre>" << h(r.bibtex_blob) << "</pre>\n";
  if (r.reexecutable) {
    o << "<p><a href=\"/reexecute/" << h(r.identifier) << "\">Re-run the query</a></p>\n";
  }
  o << "<p><a href=\"/resolve/" << h(r.identifier) << "\">Machine-readable record</a></p>\n";
  o << "</body>\n</html>\n";
  return o.str();
}

std::string render_not_found(const std::string& identifier) {
  return "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>Not found</title></head>\n"
         "<body>\n<h1>404 Not Found</h1>\n<p>No extraction is registered as <code>" +
         h(identifier) + "</code>.</p>\n</body>\n</html>\n";
}

bool serve(QueryStore& store, std::vector<std::shared_ptr<node::NodeHandle>> nodes,
           const std::string& host, int port) {
  httplib::Server server;
  auto fail = [](httplib::Response& res, const Error& e) {
    switch (e.code()) {
      case ErrorCode::UnknownIdentifier: res.status = 404; break;
      case ErrorCode::NotReexecutable: res.status = 409; break;
      case ErrorCode::NodeUnavailable: res.status = 502; break;
      case ErrorCode::StorageFailure: res.status = 500; break;
      default: res.status = 400; break;
    }
    json body{{"error", std::string(to_string(e.code()))}, {"subject", e.subject()}, {"message", e.what()}};
    res.set_content(body.dump(2) + "\n", "application/json");
  };
  server.Post("/register", [&](const httplib::Request& req, httplib::Response& res) {
    try {
      auto record = store.register_document(parse_document(req.body));
      res.set_content(to_json(record).dump(2) + "\n", "application/json");
    } catch (const Error& e) {
      fail(res, e);
    }
  });
  server.Get(R"(/resolve/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(store.landing_record(req.matches[1]) + "\n", "application/json");
    } catch (const Error& e) {
      fail(res, e);
    }
  });
  server.Get(R"(/landing/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    try {
      res.set_content(store.landing_page(id), "text/html; charset=utf-8");
    } catch (const Error&) {
      res.status = 404;
      res.set_content(render_not_found(id), "text/html; charset=utf-8");
    }
  });
  server.Get(R"(/reexecute/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
    try {
      auto record = store.resolve(req.matches[1]);
      std::shared_ptr<node::NodeHandle> handle;
      for (const auto& n : nodes) {
        if (n->origin_identifier() == record.node_origin_identifier) handle = n;
      }
      if (!handle) {
        if (!record.reexecutable) {
          throw Error(ErrorCode::NotReexecutable, record.identifier, "not a single node query");
        }
        throw Error(ErrorCode::NodeUnavailable, record.node_origin_identifier, "no node configured");
      }
      auto result = store.reexecute(record.identifier, *handle, now_utc());
      res.set_header("X-Digest-Match", result.match ? "true" : "false");
      res.set_content(serialize(result.document), "application/xml");
    } catch (const Error& e) {
      fail(res, e);
    }
  });
  return server.listen(host, port);
}

}  // namespace xsams::store
