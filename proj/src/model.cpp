#include "xsams/model.hpp"

#include <charconv>
#include <chrono>
#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "xsams/error.hpp"

namespace xsams {

std::optional<double> Decimal::try_value() const {
  if (text.empty()) return std::nullopt;
  const char* begin = text.data();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  while (*end == ' ' || *end == '\t' || *end == '\n') ++end;
  if (end != begin + text.size()) return std::nullopt;
  return v;
}

double Decimal::value() const {
  auto v = try_value();
  if (!v) throw Error(ErrorCode::InvalidInput, text, "not a decimal number");
  return *v;
}

namespace {

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  auto r = std::from_chars(s.data() + pos, s.data() + pos + n, out);
  return r.ec == std::errc{} && r.ptr == s.data() + pos + n;
}

}  // namespace

std::optional<std::int64_t> Timestamp::utc_seconds() const {
  // YYYY-MM-DDThh:mm:ss[.fff][Z|+hh:mm|-hh:mm]
  std::string_view s = text;
  int y, mo, d, h, mi, sec;
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':') {
    return std::nullopt;
  }
  if (!digits(s, 0, 4, y) || !digits(s, 5, 2, mo) || !digits(s, 8, 2, d) ||
      !digits(s, 11, 2, h) || !digits(s, 14, 2, mi) || !digits(s, 17, 2, sec)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  int offset_minutes = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      ++pos;
    } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() &&
               s[pos + 3] == ':') {
      int oh, om;
      if (!digits(s, pos + 1, 2, oh) || !digits(s, pos + 4, 2, om)) return std::nullopt;
      if (oh > 23 || om > 59) return std::nullopt;
      offset_minutes = (oh * 60 + om) * (s[pos] == '-' ? -1 : 1);
      pos += 6;
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return days * 86400 + h * 3600 + mi * 60 + sec - offset_minutes * 60;
}

std::string Timestamp::date() const { return text.substr(0, 10); }

Timestamp now_utc() {
  using namespace std::chrono;
  auto now = floor<seconds>(system_clock::now());
  auto days = floor<std::chrono::days>(now);
  year_month_day ymd{days};
  hh_mm_ss hms{now - days};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d+00:00",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return Timestamp{buf};
}

std::string_view to_xsi_type(OriginKind kind) {
  switch (kind) {
    case OriginKind::Node: return "VamdcNodeOriginType";
    case OriginKind::Processor: return "VamdcProcessorOriginType";
    case OriginKind::Other: return "OtherOriginType";
  }
  return "OtherOriginType";
}

std::optional<OriginKind> origin_kind_from_xsi_type(std::string_view type) {
  auto local = xml::local_name(type);
  if (local == "VamdcNodeOriginType") return OriginKind::Node;
  if (local == "VamdcProcessorOriginType") return OriginKind::Processor;
  if (local == "OtherOriginType") return OriginKind::Other;
  return std::nullopt;
}

std::optional<std::string> find_quantum_number(const QuantumNumbers& qns,
                                               std::string_view name) {
  for (const auto& [k, v] : qns) {
    if (k == name) return v;
  }
  return std::nullopt;
}

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Species: return "species";
    case ElementKind::State: return "state";
    case ElementKind::Process: return "process";
    case ElementKind::Source: return "source";
    case ElementKind::Version: return "version";
  }
  return "unknown";
}

std::vector<const Version*> all_versions(const XsamsDocument& doc) {
  std::vector<const Version*> out;
  for_each_origin(doc.origins, [&](const Origin& o) {
    for (const auto& v : o.versions) out.push_back(&v);
  });
  return out;
}

std::size_t origin_tree_depth(const std::vector<Origin>& origins) {
  std::size_t depth = 0;
  for (const auto& o : origins) {
    depth = std::max(depth, 1 + origin_tree_depth(o.sub_origins));
  }
  return depth;
}

std::map<std::string, ElementKind> collect_identifiers(const XsamsDocument& doc) {
  std::map<std::string, ElementKind> ids;
  auto add = [&](const std::string& id, ElementKind kind) {
    auto [it, inserted] = ids.emplace(id, kind);
    if (!inserted) {
      throw Error(ErrorCode::DuplicateIdentifier, id,
                  "declared as " + std::string(to_string(it->second)) + " and " +
                      std::string(to_string(kind)));
    }
  };
  for (const auto& a : doc.atoms) {
    add(a.species_id, ElementKind::Species);
    for (const auto& s : a.states) add(s.state_id, ElementKind::State);
  }
  for (const auto& m : doc.molecules) {
    add(m.species_id, ElementKind::Species);
    for (const auto& s : m.states) add(s.state_id, ElementKind::State);
  }
  for (const auto& p : doc.radiative) add(p.id, ElementKind::Process);
  for (const auto& p : doc.collisions) add(p.id, ElementKind::Process);
  for (const auto& s : doc.sources) add(s.source_id, ElementKind::Source);
  for (const auto* v : all_versions(doc)) add(v->version_id, ElementKind::Version);
  return ids;
}

ElementRef resolve_ref(const XsamsDocument& doc, std::string_view id) {
  for (const auto& a : doc.atoms) {
    if (a.species_id == id) return &a;
    for (const auto& s : a.states) {
      if (s.state_id == id) return &s;
    }
  }
  for (const auto& m : doc.molecules) {
    if (m.species_id == id) return &m;
    for (const auto& s : m.states) {
      if (s.state_id == id) return &s;
    }
  }
  for (const auto& p : doc.radiative) {
    if (p.id == id) return &p;
  }
  for (const auto& p : doc.collisions) {
    if (p.id == id) return &p;
  }
  for (const auto& s : doc.sources) {
    if (s.source_id == id) return &s;
  }
  for (const auto* v : all_versions(doc)) {
    if (v->version_id == id) return v;
  }
  throw Error(ErrorCode::UnresolvedReference, std::string(id),
              "no element declares this identifier");
}

std::vector<std::string> data_identifiers(const XsamsDocument& doc) {
  std::vector<std::string> out;
  for (const auto& a : doc.atoms) out.push_back(a.species_id);
  for (const auto& m : doc.molecules) out.push_back(m.species_id);
  for (const auto& a : doc.atoms) {
    for (const auto& s : a.states) out.push_back(s.state_id);
  }
  for (const auto& m : doc.molecules) {
    for (const auto& s : m.states) out.push_back(s.state_id);
  }
  for (const auto& p : doc.radiative) out.push_back(p.id);
  for (const auto& p : doc.collisions) out.push_back(p.id);
  for (const auto& s : doc.sources) out.push_back(s.source_id);
  return out;
}

std::map<std::string, std::string> version_membership(const XsamsDocument& doc) {
  std::map<std::string, std::string> owner;
  auto claim = [&](const std::string& id, const std::string& version) {
    auto [it, inserted] = owner.emplace(id, version);
    if (!inserted && it->second != version) {
      throw Error(ErrorCode::MultipleVersionMembership, id,
                  "claimed by " + it->second + " and " + version);
    }
  };
  for (const auto* v : all_versions(doc)) {
    if (v->global) {
      for (const auto& id : data_identifiers(doc)) claim(id, v->version_id);
    }
    for (const auto* list : {&v->species_refs, &v->state_refs, &v->process_refs,
                             &v->source_refs}) {
      for (const auto& id : *list) claim(id, v->version_id);
    }
  }
  return owner;
}

std::optional<std::string> species_of_state(const XsamsDocument& doc,
                                            std::string_view state_id) {
  for (const auto& a : doc.atoms) {
    for (const auto& s : a.states) {
      if (s.state_id == state_id) return a.species_id;
    }
  }
  for (const auto& m : doc.molecules) {
    for (const auto& s : m.states) {
      if (s.state_id == state_id) return m.species_id;
    }
  }
  return std::nullopt;
}

}  // namespace xsams
