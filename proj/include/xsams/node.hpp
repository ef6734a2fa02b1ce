#pragma once

// A simulated data node: a fixed pool of species, states, processes and
// sources that answers queries with a provenance-stamped document.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xsams/model.hpp"
#include "xsams/query.hpp"

namespace xsams::node {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

// Vacuum wavelength in angstrom of a line at the given frequency in MHz.
double wavelength_angstrom(double frequency_mhz);

struct NodeVersion {
  std::string version_id;
  Timestamp timestamp;
  std::set<std::string> members;
  bool is_default = false;  // claims every identifier not listed elsewhere
};

// Template for the source the node adds to describe the extraction itself.
// "{query}" in uri and comments is replaced by the rendered query.
struct SelfSource {
  std::optional<std::string> source_name;
  std::vector<std::string> authors;
  std::optional<std::string> uri;
  std::string comments = "{query}";
};

struct NodeConfig {
  std::string name;
  std::string homepage_url;
  std::string origin_identifier;
  std::optional<std::string> comments;
  std::string source_prefix;  // self-source id is source_prefix + "0"
  SelfSource self_source;
  std::vector<NodeVersion> versions;

  std::string self_source_id() const { return source_prefix + "0"; }
};

// JSON object; see README for the keys. Throws Error(InvalidInput).
NodeConfig parse_config(std::string_view json_text);
NodeConfig load_config(const std::string& path);

struct NodeDataset {
  XsamsDocument holdings;
  std::map<std::string, query::Record> attributes;  // process id -> record
  // Extra sources brought in whenever a process or species is returned.
  std::map<std::string, std::vector<std::string>> cites;

  std::size_t process_count() const {
    return holdings.radiative.size() + holdings.collisions.size();
  }
};

// Attributes derivable from the holdings alone: formulas and atom symbols
// of targets and colliders, and wavelength in angstrom for radiative lines.
query::Record derived_attributes(const XsamsDocument& holdings, const RadiativeTransition& t);
query::Record derived_attributes(const XsamsDocument& holdings, const CollisionalTransition& t);

// Sidecar format: "[id]" section headers, "keyword = value" lines, '#'
// comments. The reserved keyword "cites" lists source ids separated by
// spaces. Sidecar values override derived ones.
NodeDataset make_dataset(XsamsDocument holdings, std::string_view sidecar);

// Reads an XSAMS holdings file and, when present, "<path>.attrs". A file with
// no content yields an empty dataset.
NodeDataset load_dataset(const std::string& path);

XsamsDocument answer(const NodeDataset& dataset, const NodeConfig& config,
                     const query::QueryAst& ast, const Timestamp& now);

// Something that can run a query and hand back a document.
class NodeHandle {
 public:
  virtual ~NodeHandle() = default;
  virtual std::string origin_identifier() const = 0;
  // Throws Error(NodeUnavailable) when the node cannot be reached.
  virtual XsamsDocument execute(const query::QueryAst& ast, const Timestamp& now) = 0;
};

class LocalNode : public NodeHandle {
 public:
  LocalNode(std::shared_ptr<const NodeDataset> dataset, NodeConfig config);
  std::string origin_identifier() const override { return config_.origin_identifier; }
  XsamsDocument execute(const query::QueryAst& ast, const Timestamp& now) override;

 private:
  std::shared_ptr<const NodeDataset> dataset_;
  NodeConfig config_;
};

// Client for serve(); the node stamps documents with its own clock.
class HttpNode : public NodeHandle {
 public:
  HttpNode(std::string host, int port, std::string origin_identifier);
  std::string origin_identifier() const override { return origin_identifier_; }
  XsamsDocument execute(const query::QueryAst& ast, const Timestamp& now) override;

 private:
  std::string host_;
  int port_;
  std::string origin_identifier_;
};

// Blocking HTTP server exposing GET /tap/sync?REQUEST=doQuery&FORMAT=XSAMS&QUERY=...
// Returns when the process is stopped; returns false if binding fails.
bool serve(std::shared_ptr<const NodeDataset> dataset, const NodeConfig& config,
           const std::string& host, int port);

}  // namespace xsams::node
