#include "xsams/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "xsams/bibtex.hpp"
#include "xsams/error.hpp"
#include "xsams/io.hpp"
#include "xsams/merge.hpp"
#include "xsams/node.hpp"
#include "xsams/query.hpp"
#include "xsams/query_store.hpp"
#include "xsams/validator.hpp"

namespace xsams::cli {

namespace {

struct ExitError {
  int code;
  std::string message;
};

std::string read_input(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ExitError{kExitNoInput, path + ": no such file"};
  }
  try {
    return read_file(path);
  } catch (const Error& e) {
    throw ExitError{kExitNoInput, e.what()};
  }
}

Timestamp clock(const std::string& now) {
  if (now.empty()) return now_utc();
  Timestamp t{now};
  if (!t.valid()) throw ExitError{kExitUsage, "--now: not an ISO-8601 timestamp: " + now};
  return t;
}

void emit(std::ostream& out, const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    out << bytes;
  } else {
    write_file(path, bytes);
  }
}

std::string default_journal() {
  if (const char* env = std::getenv("QS_JOURNAL_PATH"); env && *env) return env;
  return "qs-journal.jsonl";
}

std::vector<std::string> split_keys(const std::vector<std::string>& raw) {
  std::vector<std::string> keys;
  for (const auto& r : raw) {
    std::stringstream in(r);
    for (std::string k; std::getline(in, k, ',');) {
      if (!k.empty()) keys.push_back(k);
    }
  }
  return keys;
}

std::shared_ptr<node::LocalNode> local_node(const std::string& config_path, const std::string& holdings_path) {
  auto config = node::parse_config(read_input(config_path));
  read_input(holdings_path);  // existence check with the right exit code
  auto dataset = std::make_shared<const node::NodeDataset>(node::load_dataset(holdings_path));
  return std::make_shared<node::LocalNode>(dataset, std::move(config));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Provenance-aware XSAMS toolkit", "xsams"};
  app.require_subcommand(1);

  std::string now;
  auto add_now = [&](CLI::App* sub) {
    sub->add_option("--now", now, "Fixed clock (ISO-8601) for reproducible output");
  };

  // validate
  std::string validate_file;
  auto* validate_cmd = app.add_subcommand("validate", "Check provenance rules");
  validate_cmd->add_option("file", validate_file)->required();

  // bibtex
  std::string bib_file;
  bool no_self = false;
  auto* bib_cmd = app.add_subcommand("bibtex", "Print the sources as BibTeX");
  bib_cmd->add_option("file", bib_file)->required();
  bib_cmd->add_flag("--no-self", no_self, "Skip database self-reference sources");

  // merge
  std::string spec_file, coll_file, merge_out;
  std::vector<std::string> match_on;
  merge::ToolConfig tool{"Spectcol", "http://www.vamdc.org/activities/research/software/spectcol/",
                         std::nullopt, std::nullopt};
  std::string tool_comment, tool_identifier;
  auto* merge_cmd = app.add_subcommand("merge", "Merge spectroscopic and collisional documents");
  merge_cmd->add_option("--spectroscopic", spec_file)->required();
  merge_cmd->add_option("--collisional", coll_file)->required();
  merge_cmd->add_option("--match-on", match_on, "Quantum numbers, comma separated")->required();
  merge_cmd->add_option("--out", merge_out);
  merge_cmd->add_option("--tool-name", tool.name);
  merge_cmd->add_option("--tool-homepage", tool.homepage_url);
  merge_cmd->add_option("--tool-comment", tool_comment);
  merge_cmd->add_option("--tool-identifier", tool_identifier);
  add_now(merge_cmd);

  // query
  std::string node_config, holdings, query_text, query_out;
  auto* query_cmd = app.add_subcommand("query", "Run a query against a simulated node");
  query_cmd->add_option("--node", node_config, "Node configuration (JSON)")->required();
  query_cmd->add_option("--holdings", holdings, "Node holdings (XSAMS)")->required();
  query_cmd->add_option("--query", query_text)->required();
  query_cmd->add_option("--out", query_out);
  add_now(query_cmd);

  // serve-node
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* node_cmd = app.add_subcommand("serve-node", "Expose a simulated node over HTTP");
  node_cmd->add_option("--node", node_config)->required();
  node_cmd->add_option("--holdings", holdings)->required();
  node_cmd->add_option("--host", host);
  node_cmd->add_option("--port", port);

  // store
  std::string journal = default_journal();
  auto* store_cmd = app.add_subcommand("store", "Query store");
  store_cmd->require_subcommand(1);
  store_cmd->add_option("--journal", journal, "Journal file (default $QS_JOURNAL_PATH)");

  auto* store_serve = store_cmd->add_subcommand("serve", "Run the HTTP service");
  std::vector<std::string> store_nodes;
  store_serve->add_option("--host", host);
  store_serve->add_option("--port", port);
  store_serve->add_option("--node", store_nodes, "config.json:holdings.xml, repeatable");

  std::string register_file;
  auto* store_register = store_cmd->add_subcommand("register", "Register a document");
  store_register->add_option("file", register_file)->required();

  std::string identifier;
  bool html = false;
  auto* store_resolve = store_cmd->add_subcommand("resolve", "Print a record");
  store_resolve->add_option("identifier", identifier)->required();
  store_resolve->add_flag("--html", html, "Print the landing page instead");

  std::string reexec_out;
  auto* store_reexec = store_cmd->add_subcommand("reexecute", "Re-run a registered query");
  store_reexec->add_option("identifier", identifier)->required();
  store_reexec->add_option("--node", node_config)->required();
  store_reexec->add_option("--holdings", holdings)->required();
  store_reexec->add_option("--out", reexec_out);
  add_now(store_reexec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "xsams: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) {
      auto bytes = read_input(validate_file);
      XsamsDocument doc;
      try {
        doc = parse_document(bytes);
      } catch (const Error& e) {
        err << validate_file << ": " << e.what() << "\n";
        return kExitParse;
      }
      auto report = validate(doc);
      out << explain(report) << "\n";
      return report.valid() ? kExitOk : kExitFailure;
    }
    if (bib_cmd->parsed()) {
      auto doc = parse_document(read_input(bib_file));
      bibtex::Options options;
      options.include_self_references = !no_self;
      out << bibtex::doc_to_bibtex(doc, options);
      return kExitOk;
    }
    if (merge_cmd->parsed()) {
      auto keys = split_keys(match_on);
      if (keys.empty()) throw ExitError{kExitUsage, "--match-on: no quantum number given"};
      if (!tool_comment.empty()) tool.comment = tool_comment;
      if (!tool_identifier.empty()) tool.origin_identifier = tool_identifier;
      auto spec_doc = parse_document(read_input(spec_file));
      auto coll_doc = parse_document(read_input(coll_file));
      auto merged = merge::merge(spec_doc, coll_doc, merge::MatchSpec{keys}, tool, clock(now));
      emit(out, merge_out, serialize(merged));
      return kExitOk;
    }
    if (query_cmd->parsed()) {
      auto ast = query::parse_query(query_text);
      auto t = clock(now);
      auto node = local_node(node_config, holdings);
      emit(out, query_out, serialize(node->execute(ast, t)));
      return kExitOk;
    }
    if (node_cmd->parsed()) {
      auto config = node::parse_config(read_input(node_config));
      read_input(holdings);
      auto dataset = std::make_shared<const node::NodeDataset>(node::load_dataset(holdings));
      err << "serving " << config.name << " on http://" << host << ":" << port << "/tap/sync\n";
      return node::serve(dataset, config, host, port) ? kExitOk : kExitFailure;
    }
    if (store_cmd->parsed()) {
      store::QueryStore qs(store::StoreOptions{journal, true});
      if (store_serve->parsed()) {
        std::vector<std::shared_ptr<node::NodeHandle>> nodes;
        for (const auto& spec : store_nodes) {
          auto colon = spec.find(':');
          if (colon == std::string::npos) throw ExitError{kExitUsage, "--node expects config.json:holdings.xml"};
          nodes.push_back(local_node(spec.substr(0, colon), spec.substr(colon + 1)));
        }
        err << "query store on http://" << host << ":" << port << " (" << qs.size() << " records)\n";
        return store::serve(qs, nodes, host, port) ? kExitOk : kExitFailure;
      }
      if (store_register->parsed()) {
        auto record = qs.register_document(parse_document(read_input(register_file)));
        out << store::to_json(record).dump(2) << "\n";
        return kExitOk;
      }
      if (store_resolve->parsed()) {
        out << (html ? qs.landing_page(identifier) : qs.landing_record(identifier) + "\n");
        return kExitOk;
      }
      if (store_reexec->parsed()) {
        auto node = local_node(node_config, holdings);
        auto result = qs.reexecute(identifier, *node, clock(now));
        emit(out, reexec_out, serialize(result.document));
        err << "digest " << (result.match ? "matches" : "differs") << ": " << result.digest << "\n";
        return result.match ? kExitOk : kExitFailure;
      }
    }
  } catch (const ExitError& e) {
    err << "xsams: " << e.message << "\n";
    return e.code;
  } catch (const Error& e) {
    err << "xsams: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace xsams::cli
