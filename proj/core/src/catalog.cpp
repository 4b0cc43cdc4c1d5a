#include "galois/catalog.hpp"

#include <cctype>
#include <charconv>
#include <regex>
#include <set>

#include <json.hpp>

#include "galois/csv.hpp"
#include "galois/errors.hpp"

namespace galois {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& relation, const std::string& message) {
  throw ValidationError("relation " + relation + ": " + message);
}

std::optional<std::int64_t> strict_int(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<double> strict_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// Enum values are stored in the canonical rendering of the attribute type so
// membership checks can compare rendered cells byte for byte.
std::string canonical_enum_value(const std::string& relation, const AttrDecl& attr,
                                 const std::string& raw) {
  switch (attr.type) {
    case ValueType::Text:
      return raw;
    case ValueType::Int: {
      auto v = strict_int(raw);
      if (!v) fail(relation, "enum value '" + raw + "' is not an int for attribute " + attr.name);
      return std::to_string(*v);
    }
    case ValueType::Float: {
      auto v = strict_double(raw);
      if (!v) fail(relation, "enum value '" + raw + "' is not a float for attribute " + attr.name);
      return render_double(*v);
    }
    case ValueType::Bool:
      if (raw != "true" && raw != "false") {
        fail(relation, "enum value '" + raw + "' is not a bool for attribute " + attr.name);
      }
      return raw;
  }
  return raw;
}

Domain parse_domain(const std::string& relation, AttrDecl& attr, const ordered_json& node) {
  if (!node.is_object() || node.size() != 1) {
    fail(relation, "domain of attribute " + attr.name +
                       " must be an object with exactly one of range, enum, pattern");
  }
  if (node.contains("range")) {
    if (attr.type != ValueType::Int && attr.type != ValueType::Float) {
      fail(relation, "range domain requires a numeric attribute, got " + attr.name);
    }
    const auto& r = node["range"];
    if (!r.is_array() || r.size() != 2) {
      fail(relation, "range domain of attribute " + attr.name + " must be [low, high]");
    }
    RangeDomain range;
    if (!r[0].is_null()) {
      if (!r[0].is_number()) fail(relation, "range low bound must be a number or null");
      range.low = r[0].get<double>();
    }
    if (!r[1].is_null()) {
      if (!r[1].is_number()) fail(relation, "range high bound must be a number or null");
      range.high = r[1].get<double>();
    }
    if (range.low && range.high && *range.low > *range.high) {
      fail(relation, "range domain of attribute " + attr.name + " has low > high");
    }
    return range;
  }
  if (node.contains("enum")) {
    const auto& e = node["enum"];
    if (!e.is_array() || e.empty()) {
      fail(relation, "enum domain of attribute " + attr.name + " must be a non-empty array");
    }
    EnumDomain dom;
    for (const auto& v : e) {
      if (!v.is_string()) fail(relation, "enum values must be strings");
      dom.values.push_back(canonical_enum_value(relation, attr, v.get<std::string>()));
    }
    return dom;
  }
  if (node.contains("pattern")) {
    if (attr.type != ValueType::Text) {
      fail(relation, "pattern domain requires a text attribute, got " + attr.name);
    }
    const auto& p = node["pattern"];
    if (!p.is_string()) fail(relation, "pattern domain must be a string");
    PatternDomain dom{p.get<std::string>()};
    try {
      std::regex compiled(dom.pattern);
    } catch (const std::regex_error& e) {
      fail(relation, "pattern domain of attribute " + attr.name +
                         " does not compile: " + e.what());
    }
    return dom;
  }
  fail(relation, "domain of attribute " + attr.name + " must contain range, enum, or pattern");
}

void check_local_source(RelationDecl& rel, const std::filesystem::path& base_dir) {
  std::filesystem::path p(rel.source.local_path);
  if (p.is_relative()) p = base_dir / p;
  rel.source.resolved_path = std::filesystem::absolute(p).lexically_normal().string();
  std::string text;
  try {
    text = read_text_file(rel.source.resolved_path);
  } catch (const Error&) {
    fail(rel.name, "local source file is not readable: " + rel.source.resolved_path);
  }
  auto rows = parse_csv(text);
  if (rows.empty()) fail(rel.name, "local source file has no header row");
  const auto& header = rows.front();
  if (header.size() != rel.attributes.size()) {
    fail(rel.name, "local source header has " + std::to_string(header.size()) +
                       " columns, expected " + std::to_string(rel.attributes.size()));
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim_copy(header[i]) != rel.attributes[i].name) {
      fail(rel.name, "local source header column " + std::to_string(i + 1) + " is '" +
                         header[i] + "', expected '" + rel.attributes[i].name + "'");
    }
  }
}

RelationDecl parse_relation(const ordered_json& node, const std::filesystem::path& base_dir) {
  if (!node.is_object()) throw ValidationError("relation entry must be an object");
  RelationDecl rel;
  if (!node.contains("name") || !node["name"].is_string()) {
    throw ValidationError("relation entry is missing a string name");
  }
  rel.name = node["name"].get<std::string>();
  if (!is_identifier(rel.name)) fail(rel.name, "name is not an identifier");

  if (!node.contains("attributes") || !node["attributes"].is_array() ||
      node["attributes"].empty()) {
    fail(rel.name, "attributes must be a non-empty array");
  }
  std::set<std::string> seen;
  for (const auto& a : node["attributes"]) {
    if (!a.is_object() || !a.contains("name") || !a["name"].is_string()) {
      fail(rel.name, "attribute entries need a string name");
    }
    AttrDecl attr;
    attr.name = a["name"].get<std::string>();
    if (!is_identifier(attr.name)) fail(rel.name, "attribute name '" + attr.name + "' is not an identifier");
    if (!seen.insert(attr.name).second) {
      fail(rel.name, "duplicate attribute name " + attr.name);
    }
    if (!a.contains("type") || !a["type"].is_string()) {
      fail(rel.name, "attribute " + attr.name + " needs a type");
    }
    auto type = parse_value_type(a["type"].get<std::string>());
    if (!type) {
      fail(rel.name, "attribute " + attr.name + " has unknown type '" +
                         a["type"].get<std::string>() + "'");
    }
    attr.type = *type;
    if (a.contains("domain")) attr.domain = parse_domain(rel.name, attr, a["domain"]);
    rel.attributes.push_back(std::move(attr));
  }

  if (!node.contains("key")) fail(rel.name, "missing key attribute");
  if (node["key"].is_array()) fail(rel.name, "composite keys are not supported");
  if (!node["key"].is_string() || node["key"].get<std::string>().empty()) {
    fail(rel.name, "key must name one attribute");
  }
  rel.key = node["key"].get<std::string>();
  if (!rel.find_attribute(rel.key)) fail(rel.name, "key " + rel.key + " is not a declared attribute");

  if (!node.contains("source")) fail(rel.name, "missing source");
  const auto& source = node["source"];
  if (source.is_string()) {
    if (source.get<std::string>() != "llm") {
      fail(rel.name, "source must be \"llm\" or {\"local\": path}");
    }
    rel.source.kind = SourceKind::Llm;
  } else if (source.is_object() && source.contains("local") && source["local"].is_string()) {
    rel.source.kind = SourceKind::Local;
    rel.source.local_path = source["local"].get<std::string>();
    check_local_source(rel, base_dir);
  } else {
    fail(rel.name, "source must be \"llm\" or {\"local\": path}");
  }
  return rel;
}

}  // namespace

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto head = static_cast<unsigned char>(text[0]);
  if (!std::isalpha(head) && text[0] != '_') return false;
  for (char c : text.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '_') return false;
  }
  return true;
}

std::string describe(const Domain& domain) {
  if (const auto* range = std::get_if<RangeDomain>(&domain)) {
    std::string low = range->low ? render_double(*range->low) : "-inf";
    std::string high = range->high ? render_double(*range->high) : "inf";
    return "range [" + low + ", " + high + "]";
  }
  if (const auto* en = std::get_if<EnumDomain>(&domain)) {
    std::string out = "enum {";
    for (std::size_t i = 0; i < en->values.size(); ++i) {
      if (i) out += ", ";
      out += en->values[i];
    }
    return out + "}";
  }
  return "pattern " + std::get<PatternDomain>(domain).pattern;
}

const AttrDecl* RelationDecl::find_attribute(std::string_view attr_name) const {
  for (const auto& attr : attributes) {
    if (attr.name == attr_name) return &attr;
  }
  return nullptr;
}

const AttrDecl& RelationDecl::key_attribute() const {
  const auto* attr = find_attribute(key);
  if (!attr) throw BindError("relation " + name + " has no key attribute " + key);
  return *attr;
}

std::size_t RelationDecl::attribute_index(std::string_view attr_name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == attr_name) return i;
  }
  throw BindError("relation " + name + " has no attribute " + std::string(attr_name));
}

Catalog::Catalog(std::vector<RelationDecl> relations) : relations_(std::move(relations)) {}

const RelationDecl* Catalog::find(std::string_view name) const {
  for (const auto& rel : relations_) {
    if (rel.name == name) return &rel;
  }
  return nullptr;
}

const RelationDecl& Catalog::resolve(std::string_view name) const {
  const auto* rel = find(name);
  if (!rel) throw BindError("unknown relation: " + std::string(name));
  return *rel;
}

Catalog load_catalog(const std::string& document, const std::filesystem::path& base_dir) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("catalog is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("relations") || !doc["relations"].is_array()) {
    throw ValidationError("catalog document must contain a relations array");
  }
  std::vector<RelationDecl> relations;
  std::set<std::string> names;
  for (const auto& node : doc["relations"]) {
    RelationDecl rel = parse_relation(node, base_dir);
    if (!names.insert(rel.name).second) fail(rel.name, "duplicate relation name");
    relations.push_back(std::move(rel));
  }
  return Catalog(std::move(relations));
}

Catalog load_catalog_file(const std::filesystem::path& path) {
  return load_catalog(read_text_file(path.string()), path.parent_path());
}

std::string render_catalog(const Catalog& catalog) {
  ordered_json doc;
  doc["relations"] = ordered_json::array();
  for (const auto& rel : catalog.relations()) {
    ordered_json r;
    r["name"] = rel.name;
    r["key"] = rel.key;
    if (rel.source.kind == SourceKind::Llm) {
      r["source"] = "llm";
    } else {
      r["source"] = ordered_json{{"local", rel.source.local_path}};
    }
    r["attributes"] = ordered_json::array();
    for (const auto& attr : rel.attributes) {
      ordered_json a;
      a["name"] = attr.name;
      a["type"] = to_string(attr.type);
      if (attr.domain) {
        if (const auto* range = std::get_if<RangeDomain>(&*attr.domain)) {
          ordered_json bounds = ordered_json::array();
          bounds.push_back(range->low ? ordered_json(*range->low) : ordered_json(nullptr));
          bounds.push_back(range->high ? ordered_json(*range->high) : ordered_json(nullptr));
          a["domain"] = ordered_json{{"range", bounds}};
        } else if (const auto* en = std::get_if<EnumDomain>(&*attr.domain)) {
          a["domain"] = ordered_json{{"enum", en->values}};
        } else {
          a["domain"] =
              ordered_json{{"pattern", std::get<PatternDomain>(*attr.domain).pattern}};
        }
      }
      r["attributes"].push_back(std::move(a));
    }
    doc["relations"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

}  // namespace galois
