#include "galois/fact_store.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "galois/csv.hpp"
#include "galois/errors.hpp"

namespace galois::backend {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw ValidationError("fact store: " + message);
}

}  // namespace

FactStore FactStore::parse(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("fact store is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("keys") || !doc["keys"].is_object()) {
    fail("document needs a keys object");
  }
  FactStore store;
  for (const auto& [relation, list] : doc["keys"].items()) {
    if (!list.is_array()) fail("keys of " + relation + " must be an array");
    std::set<std::string> seen;
    for (const auto& key : list) {
      if (!key.is_string()) fail("keys of " + relation + " must be strings");
      std::string value = key.get<std::string>();
      if (value.empty()) fail("relation " + relation + " has an empty key");
      if (!seen.insert(value).second) {
        fail("relation " + relation + " lists key '" + value + "' twice");
      }
      store.keys[relation].push_back(std::move(value));
    }
  }
  if (doc.contains("cells")) {
    if (!doc["cells"].is_object()) fail("cells must be an object");
    for (const auto& [relation, by_key] : doc["cells"].items()) {
      if (!store.keys.count(relation)) {
        fail("cells reference undeclared relation " + relation);
      }
      if (!by_key.is_object()) fail("cells of " + relation + " must be an object");
      for (const auto& [key, by_attr] : by_key.items()) {
        if (!by_attr.is_object()) {
          fail("cells of " + relation + " '" + key + "' must be an object");
        }
        for (const auto& [attribute, value] : by_attr.items()) {
          if (!value.is_string()) {
            fail("cell " + relation + "/" + key + "/" + attribute + " must be a string");
          }
          store.cells[relation][key][attribute] = value.get<std::string>();
        }
      }
    }
  }
  if (doc.contains("qa")) {
    if (!doc["qa"].is_object()) fail("qa must be an object");
    for (const auto& [question, answer] : doc["qa"].items()) {
      if (!answer.is_string()) fail("qa answers must be strings");
      store.qa[question] = answer.get<std::string>();
    }
  }
  if (doc.contains("page_size")) {
    if (!doc["page_size"].is_number_integer() || doc["page_size"].get<int>() <= 0) {
      fail("page_size must be a positive integer");
    }
    store.page_size = doc["page_size"].get<int>();
  }
  return store;
}

FactStore FactStore::load_file(const std::filesystem::path& path) {
  return parse(read_text_file(path.string()));
}

const std::string* FactStore::cell(const std::string& relation, const std::string& key,
                                   const std::string& attribute) const {
  auto by_key = cells.find(relation);
  if (by_key == cells.end()) return nullptr;
  auto by_attr = by_key->second.find(key);
  if (by_attr == by_key->second.end()) return nullptr;
  auto value = by_attr->second.find(attribute);
  if (value == by_attr->second.end()) return nullptr;
  return &value->second;
}

void FactStore::validate_against(const Catalog& catalog) const {
  for (const auto& [relation, key_list] : keys) {
    const RelationDecl* decl = catalog.find(relation);
    if (!decl) fail("relation " + relation + " is not in the catalog");
    (void)key_list;
  }
  for (const auto& [relation, by_key] : cells) {
    const RelationDecl* decl = catalog.find(relation);
    if (!decl) fail("relation " + relation + " is not in the catalog");
    const auto& listed = keys.at(relation);
    for (const auto& [key, by_attr] : by_key) {
      if (std::find(listed.begin(), listed.end(), key) == listed.end()) {
        fail("relation " + relation + " has cells for unlisted key '" + key + "'");
      }
      for (const auto& [attribute, value] : by_attr) {
        if (!decl->find_attribute(attribute)) {
          fail("relation " + relation + " has cells for unknown attribute " + attribute);
        }
        (void)value;
      }
    }
  }
}

NoiseConfig NoiseConfig::parse(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("noise config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("noise config must be an object");
  NoiseConfig config;
  auto rate = [&](const char* name, double& slot) {
    if (!doc.contains(name)) return;
    if (!doc[name].is_number()) throw ValidationError(std::string(name) + " must be a number");
    slot = doc[name].get<double>();
    if (slot < 0 || slot > 1) {
      throw ValidationError(std::string(name) + " must be within [0, 1]");
    }
  };
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      throw ValidationError("seed must be an integer");
    }
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  rate("drop_rate", config.drop_rate);
  rate("hallucination_rate", config.hallucination_rate);
  if (doc.contains("format_noise")) {
    if (!doc["format_noise"].is_boolean()) {
      throw ValidationError("format_noise must be a boolean");
    }
    config.format_noise = doc["format_noise"].get<bool>();
  }
  if (doc.contains("alias")) {
    if (!doc["alias"].is_object()) throw ValidationError("alias must be an object");
    for (const auto& [from, to] : doc["alias"].items()) {
      if (!to.is_string()) throw ValidationError("alias values must be strings");
      config.alias[from] = to.get<std::string>();
    }
  }
  return config;
}

NoiseConfig NoiseConfig::load_file(const std::filesystem::path& path) {
  return parse(read_text_file(path.string()));
}

std::uint64_t noise_hash(std::uint64_t seed, std::initializer_list<std::string_view> parts) {
  std::uint64_t hash = 14695981039346656037ull;
  auto mix = [&](unsigned char byte) {
    hash ^= byte;
    hash *= 1099511628211ull;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
  for (std::string_view part : parts) {
    mix(0);
    for (char c : part) mix(static_cast<unsigned char>(c));
  }
  return hash;
}

double hash_to_unit(std::uint64_t hash) {
  return static_cast<double>(hash >> 11) * 0x1.0p-53;
}

}  // namespace galois::backend
