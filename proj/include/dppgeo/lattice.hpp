#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace dppgeo {

/// Largest ground set for which the 2^m power set is enumerated.
inline constexpr int kMaxEnumerationM = 12;
/// Largest ground set accepted by kernel-only operations.
inline constexpr int kMaxKernelM = 64;

/// A subset of the ground set {1, ..., m}, stored as a bitmask (element a
/// lives at bit a-1).
struct SubsetId {
  std::uint64_t bits = 0;
  int m = 0;

  static SubsetId empty(int m);
  /// Builds a subset from 1-based element labels.
  static SubsetId from_elements(int m, const std::vector<int>& elements);
  static SubsetId from_elements(int m, std::initializer_list<int> elements) {
    return from_elements(m, std::vector<int>(elements));
  }

  int cardinality() const noexcept;
  bool contains(int element) const noexcept;  // 1-based
  bool is_subset_of(const SubsetId& other) const noexcept {
    return (bits & ~other.bits) == 0;
  }
  /// Sorted 1-based labels.
  std::vector<int> elements() const;

  friend bool operator==(const SubsetId&, const SubsetId&) = default;
  friend auto operator<=>(const SubsetId&, const SubsetId&) = default;
};

std::uint64_t binomial(int n, int k);

/// Number of unordered pairs m(m-1)/2.
inline int pair_count(int m) { return m * (m - 1) / 2; }

/// Position of the pair {i, j} (0-based bits, i < j) in lexicographic pair
/// order {1,2}, {1,3}, ..., {m-1,m}.
int pair_index(int m, int i, int j);

/// All k-subsets of {1..m} in lexicographic order of their sorted elements.
std::vector<SubsetId> enumerate_sk(int m, int k);

/// T_I(A): 1 iff I is contained in A.
int sufficient_stat(const SubsetId& index_set, const SubsetId& observed);

/// All l-subsets of I in lexicographic order; these are the lower
/// neighbours feeding theta^I in the recursion (l < |I|).
std::vector<SubsetId> proper_subsets_of_size(const SubsetId& index_set, int l);

/// All 2^m subsets, ascending bitmask order (empty set first).
std::vector<SubsetId> enumerate_powerset(int m);

/// Bidirectional map between nonempty subsets and their positions in the
/// (cardinality ascending, then lex) layout used for every parameter vector.
class SubsetIndex {
 public:
  struct Position {
    int cardinality;
    int in_layer;  // 0-based within S_k^m
    int global;    // 0-based among all 2^m - 1 nonempty subsets
  };

  explicit SubsetIndex(int m);

  int m() const noexcept { return m_; }
  /// 2^m - 1.
  int size() const noexcept { return static_cast<int>(order_.size()); }
  int layer_offset(int k) const { return offsets_.at(k); }
  int layer_size(int k) const { return offsets_.at(k + 1) - offsets_.at(k); }

  Position forward(const SubsetId& subset) const;
  SubsetId backward(int global) const;

  /// Fast path: global position of a nonempty mask.
  int global_of(std::uint64_t bits) const { return global_of_mask_[bits]; }
  std::uint64_t mask_at(int global) const { return order_[global]; }

 private:
  int m_;
  std::vector<std::uint64_t> order_;
  std::vector<int> global_of_mask_;
  std::vector<int> offsets_;  // offsets_[k] = first global position of layer k
};

}  // namespace dppgeo
