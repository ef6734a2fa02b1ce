// Thin string-in, string-out bindings over the C++ core. Documents cross the
// boundary as XSAMS text; records as dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "xsams/bibtex.hpp"
#include "xsams/error.hpp"
#include "xsams/io.hpp"
#include "xsams/merge.hpp"
#include "xsams/node.hpp"
#include "xsams/query.hpp"
#include "xsams/query_store.hpp"
#include "xsams/validator.hpp"

namespace py = pybind11;
using namespace xsams;

namespace {

Timestamp clock_or_now(const std::optional<std::string>& now) {
  if (!now) return now_utc();
  Timestamp t{*now};
  if (!t.valid()) throw Error(ErrorCode::InvalidInput, *now, "not an ISO-8601 timestamp");
  return t;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::shared_ptr<node::LocalNode> local_node(const std::string& config, const std::string& holdings) {
  auto ds = std::make_shared<const node::NodeDataset>(node::load_dataset(holdings));
  return std::make_shared<node::LocalNode>(ds, node::load_config(config));
}

py::list findings(const std::vector<Finding>& fs) {
  py::list out;
  for (const auto& f : fs) out.append(py::make_tuple(f.code, f.subject, f.message));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  static py::exception<Error> error_type(m, "XsamsError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args: (code, subject, message)
      py::tuple args = py::make_tuple(std::string(to_string(e.code())), e.subject(), std::string(e.what()));
      PyErr_SetObject(error_type.ptr(), args.ptr());
    }
  });

  m.def("roundtrip", [](const std::string& xml) { return serialize(parse_document(xml)); });
  m.def("canonical_form", [](const std::string& xml) { return canonical_form(parse_document(xml)); });
  m.def("canonical_digest", [](const std::string& xml) { return canonical_digest(parse_document(xml)); });

  m.def("validate", [](const std::string& xml) {
    auto report = validate(parse_document(xml));
    py::dict out;
    out["valid"] = report.valid();
    out["errors"] = findings(report.errors);
    out["warnings"] = findings(report.warnings);
    out["report"] = explain(report);
    return out;
  });

  m.def("bibtex", [](const std::string& xml, bool include_self_references) {
    bibtex::Options opts;
    opts.include_self_references = include_self_references;
    return bibtex::doc_to_bibtex(parse_document(xml), opts);
  }, py::arg("xml"), py::arg("include_self_references") = true);

  m.def("parse_query", [](const std::string& text) {
    py::list out;
    for (const auto& c : query::parse_query(text).constraints) {
      py::object value;
      if (const auto* n = std::get_if<query::Number>(&c.value)) {
        value = py::float_(n->value);
      } else {
        value = py::str(std::get<query::Text>(c.value).value);
      }
      out.append(py::make_tuple(c.keyword, std::string(query::to_string(c.op)), value));
    }
    return out;
  });
  m.def("render_query", [](const std::string& text) { return query::render(query::parse_query(text)); });
  m.def("evaluate_query", [](const std::string& text, const query::Record& record) {
    return query::evaluate(query::parse_query(text), record);
  });

  m.def("merge",
        [](const std::string& spectroscopic, const std::string& collisional, std::vector<std::string> match_on,
           const std::string& tool_name, const std::string& tool_homepage, std::optional<std::string> now) {
          merge::ToolConfig tool{tool_name, tool_homepage, std::nullopt, std::nullopt};
          return serialize(merge::merge(parse_document(spectroscopic), parse_document(collisional),
                                        merge::MatchSpec{std::move(match_on)}, tool, clock_or_now(now)));
        },
        py::arg("spectroscopic"), py::arg("collisional"), py::arg("match_on"),
        py::arg("tool_name") = "Spectcol",
        py::arg("tool_homepage") = "http://www.vamdc.org/activities/research/software/spectcol/",
        py::arg("now") = py::none());

  m.def("node_query",
        [](const std::string& config, const std::string& holdings, const std::string& text,
           std::optional<std::string> now) {
          auto n = local_node(config, holdings);
          return serialize(n->execute(query::parse_query(text), clock_or_now(now)));
        },
        py::arg("config"), py::arg("holdings"), py::arg("query"), py::arg("now") = py::none());

  py::class_<store::QueryStore>(m, "QueryStore")
      .def(py::init([](const std::string& journal, bool retain_documents) {
             return std::make_unique<store::QueryStore>(store::StoreOptions{journal, retain_documents});
           }),
           py::arg("journal"), py::arg("retain_documents") = true)
      .def("register", [](store::QueryStore& qs, const std::string& xml) {
        return json_to_py(store::to_json(qs.register_document(parse_document(xml))));
      })
      .def("resolve", [](const store::QueryStore& qs, const std::string& id) {
        return json_to_py(store::to_json(qs.resolve(id)));
      })
      .def("landing_page", &store::QueryStore::landing_page)
      .def("reexecute",
           [](const store::QueryStore& qs, const std::string& id, const std::string& config,
              const std::string& holdings, std::optional<std::string> now) {
             auto n = local_node(config, holdings);
             auto r = qs.reexecute(id, *n, clock_or_now(now));
             py::dict out;
             out["match"] = r.match;
             out["digest"] = r.digest;
             out["document"] = serialize(r.document);
             return out;
           },
           py::arg("identifier"), py::arg("config"), py::arg("holdings"), py::arg("now") = py::none())
      .def("__len__", &store::QueryStore::size);
}
