#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "galois/catalog.hpp"

namespace galois::backend {

// Ground facts behind the mock backend: ordered keys per relation and raw
// cell strings per (relation, key, attribute). An optional qa map answers
// whole natural language questions for baseline fixtures.
struct FactStore {
  std::map<std::string, std::vector<std::string>> keys;
  std::map<std::string, std::map<std::string, std::map<std::string, std::string>>> cells;
  std::map<std::string, std::string> qa;
  int page_size = 10;

  static FactStore parse(const std::string& document);
  static FactStore load_file(const std::filesystem::path& path);

  // nullptr when the relation, key, or attribute has no stored value.
  const std::string* cell(const std::string& relation, const std::string& key,
                          const std::string& attribute) const;

  bool has_relation(const std::string& relation) const { return keys.count(relation) > 0; }

  // Cross-checks against a catalog: every fact relation is declared, every
  // cell's key is listed, every cell attribute exists in the declaration.
  // Throws ValidationError.
  void validate_against(const Catalog& catalog) const;
};

// Deterministic distortions applied by the mock backend. All draws hash the
// seed with the semantic coordinates of the answer, never global state, so
// answers stay a pure function of the prompt.
struct NoiseConfig {
  std::uint64_t seed = 0;
  double drop_rate = 0;           // scan forgets a key entirely
  double hallucination_rate = 0;  // fetch answers with another stored value
  bool format_noise = false;      // numbers rendered as "1k", "1,000", "approx 1000"
  std::map<std::string, std::string> alias;  // value rewrites, applied after lookup

  static NoiseConfig parse(const std::string& document);
  static NoiseConfig load_file(const std::filesystem::path& path);
};

// FNV-1a over the seed (8 bytes little endian) followed by each part with a
// zero byte separator. The noise decision rules restate this hash, so
// changing it breaks recorded oracles.
std::uint64_t noise_hash(std::uint64_t seed, std::initializer_list<std::string_view> parts);

// Top 53 bits mapped to [0, 1).
double hash_to_unit(std::uint64_t hash);

}  // namespace galois::backend
