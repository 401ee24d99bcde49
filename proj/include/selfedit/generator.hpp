#pragma once

// Simplicity-ordered program enumeration with a promotable priority prefix.
//
// The canonical stream covers every grammar-valid program whose literals come
// from the bounded alphabet: integers in [-literal_bound, literal_bound]
// (address entries in [1, literal_bound]) and all tokens. Programs of one size
// are materialized together, on first use, and cached for every generator
// sharing the catalog.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "selfedit/minilang.hpp"

namespace selfedit {

struct EnumerationBounds {
  std::int64_t literal_bound = 5;
  std::size_t max_size = kMaxProgramSize;
};

/// Atoms of the bounded alphabet in atom order.
std::vector<Atom> alphabet_atoms(std::int64_t literal_bound);
/// Addresses of the given length with entries in [1, max_entry], lexicographic.
std::vector<Address> addresses_of_length(std::size_t length, std::size_t max_entry);

class ProgramCatalog {
 public:
  explicit ProgramCatalog(EnumerationBounds bounds = {});

  const EnumerationBounds& bounds() const noexcept { return bounds_; }
  /// All canonical programs of exactly `size` nodes, in program order.
  const std::vector<Program>& of_size(std::size_t size);

  static std::shared_ptr<ProgramCatalog> shared_default();

 private:
  void build(std::size_t size);

  EnumerationBounds bounds_;
  std::vector<Atom> atoms_;
  std::vector<Atom> ints_;
  std::vector<std::unique_ptr<std::vector<Program>>> by_size_;
  std::mutex mutex_;
};

class Generator {
 public:
  /// Fresh canonical enumeration over the shared default catalog.
  Generator();
  explicit Generator(std::shared_ptr<ProgramCatalog> catalog);

  /// Next program and the advanced generator. Throws Exhausted past max_size.
  std::pair<Program, Generator> next() const;
  /// In-place variant of next(); nullopt once exhausted.
  std::optional<Program> advance();

  /// Fresh generator whose priority list starts with `p` (moved to the front
  /// if it was already listed).
  Generator promote(const Program& p) const;

  const std::vector<Program>& priority() const noexcept { return priority_; }
  /// Number of programs yielded so far.
  std::size_t yielded() const noexcept { return yielded_; }
  const std::shared_ptr<ProgramCatalog>& catalog() const noexcept { return catalog_; }

 private:
  bool in_priority(const Program& p) const;

  std::shared_ptr<ProgramCatalog> catalog_;
  std::vector<Program> priority_;
  std::shared_ptr<const std::unordered_set<std::string>> priority_keys_;
  std::size_t priority_pos_ = 0;
  std::size_t size_ = 2;
  std::size_t index_ = 0;
  std::size_t yielded_ = 0;
};

/// First `count` yields of `gen` (fewer when exhausted).
std::vector<Program> take(Generator gen, std::size_t count);

/// Boolean probe IFEQ(a, v, K(TRUE), K(FALSE)).
Program make_probe(const Address& a, const Atom& v);
bool is_probe(const Program& p);
/// The first `count` probes, in the order a filtered canonical stream yields them.
std::vector<Program> boolean_probes(std::size_t count, std::int64_t literal_bound = 5);
/// Number of probes whose address has at most `max_length` entries.
std::size_t probe_count(std::size_t max_length, std::int64_t literal_bound = 5);

}  // namespace selfedit
