#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "galois/cell.hpp"

namespace galois {

// Inclusive numeric bounds; an absent bound is unbounded on that side.
struct RangeDomain {
  std::optional<double> low;
  std::optional<double> high;

  bool operator==(const RangeDomain&) const = default;
};

// Closed set of admissible values in canonical rendering for the attribute type.
struct EnumDomain {
  std::vector<std::string> values;

  bool operator==(const EnumDomain&) const = default;
};

// Full-match regular expression over the rendered value. Text attributes only.
struct PatternDomain {
  std::string pattern;

  bool operator==(const PatternDomain&) const = default;
};

using Domain = std::variant<RangeDomain, EnumDomain, PatternDomain>;

// Human-readable constraint description used in rejection records.
std::string describe(const Domain& domain);

struct AttrDecl {
  std::string name;
  ValueType type = ValueType::Text;
  std::optional<Domain> domain;

  bool operator==(const AttrDecl&) const = default;
};

enum class SourceKind { Llm, Local };

struct SourceDecl {
  SourceKind kind = SourceKind::Llm;
  std::string local_path;     // as written in the catalog document
  std::string resolved_path;  // absolute, filled at load time for local sources

  bool operator==(const SourceDecl& other) const {
    return kind == other.kind && local_path == other.local_path;
  }
};

struct RelationDecl {
  std::string name;
  std::vector<AttrDecl> attributes;
  std::string key;  // name of the key attribute
  SourceDecl source;

  bool is_llm() const { return source.kind == SourceKind::Llm; }
  const AttrDecl* find_attribute(std::string_view attr_name) const;
  const AttrDecl& key_attribute() const;
  std::size_t attribute_index(std::string_view attr_name) const;  // throws BindError

  bool operator==(const RelationDecl&) const = default;
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<RelationDecl> relations);

  const std::vector<RelationDecl>& relations() const { return relations_; }

  const RelationDecl* find(std::string_view name) const;

  // Throws BindError naming the relation when it is absent.
  const RelationDecl& resolve(std::string_view name) const;

  bool operator==(const Catalog& other) const { return relations_ == other.relations_; }

 private:
  std::vector<RelationDecl> relations_;
};

// Parses and validates a catalog document. Local source paths resolve
// relative to base_dir and must point at a readable CSV whose header equals
// the declared attribute names in order. Every diagnostic names the
// offending relation. Throws ValidationError (or ParseError for bad JSON).
Catalog load_catalog(const std::string& document,
                     const std::filesystem::path& base_dir = ".");

Catalog load_catalog_file(const std::filesystem::path& path);

// Emits the document form; load_catalog(render_catalog(c)) equals c.
std::string render_catalog(const Catalog& catalog);

// True for [A-Za-z_][A-Za-z0-9_]*.
bool is_identifier(std::string_view text);

}  // namespace galois
