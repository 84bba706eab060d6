#include "dppgeo/lattice.hpp"

#include <bit>
#include <string>

#include "dppgeo/errors.hpp"

namespace dppgeo {
namespace {

void require_ground_set(int m, int cap) {
  if (m < 1) fail(ErrorKind::domain, "ground set size must be >= 1, got " + std::to_string(m));
  if (m > cap)
    fail(ErrorKind::capacity,
         "ground set size " + std::to_string(m) + " exceeds cap " + std::to_string(cap));
}

std::uint64_t full_mask(int m) {
  return m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
}

// Lex-order k-combinations of the given 0-based positions.
std::vector<std::uint64_t> combinations(const std::vector<int>& positions, int k) {
  std::vector<std::uint64_t> out;
  const int n = static_cast<int>(positions.size());
  if (k < 0 || k > n) return out;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    std::uint64_t bits = 0;
    for (int p : pick) bits |= std::uint64_t{1} << positions[p];
    out.push_back(bits);
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

}  // namespace

SubsetId SubsetId::empty(int m) {
  require_ground_set(m, kMaxKernelM);
  return SubsetId{0, m};
}

SubsetId SubsetId::from_elements(int m, const std::vector<int>& elements) {
  require_ground_set(m, kMaxKernelM);
  SubsetId s{0, m};
  for (int e : elements) {
    if (e < 1 || e > m)
      fail(ErrorKind::domain,
           "element " + std::to_string(e) + " outside ground set {1.." + std::to_string(m) + "}");
    s.bits |= std::uint64_t{1} << (e - 1);
  }
  return s;
}

int SubsetId::cardinality() const noexcept { return std::popcount(bits); }

bool SubsetId::contains(int element) const noexcept {
  return element >= 1 && element <= m && ((bits >> (element - 1)) & 1u);
}

std::vector<int> SubsetId::elements() const {
  std::vector<int> out;
  out.reserve(cardinality());
  for (std::uint64_t b = bits; b != 0; b &= b - 1) out.push_back(std::countr_zero(b) + 1);
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

int pair_index(int m, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= m || i == j) fail(ErrorKind::domain, "invalid pair index");
  // pairs starting with 0..i-1 come first
  return i * m - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<SubsetId> enumerate_sk(int m, int k) {
  require_ground_set(m, kMaxEnumerationM);
  if (k < 1 || k > m)
    fail(ErrorKind::domain, "layer k=" + std::to_string(k) + " outside 1.." + std::to_string(m));
  std::vector<int> positions(m);
  for (int i = 0; i < m; ++i) positions[i] = i;
  std::vector<SubsetId> out;
  for (auto bits : combinations(positions, k)) out.push_back({bits, m});
  return out;
}

int sufficient_stat(const SubsetId& index_set, const SubsetId& observed) {
  if (index_set.m != observed.m) fail(ErrorKind::domain, "subsets over different ground sets");
  if (index_set.bits == 0) fail(ErrorKind::domain, "sufficient statistic needs a nonempty index set");
  return index_set.is_subset_of(observed) ? 1 : 0;
}

std::vector<SubsetId> proper_subsets_of_size(const SubsetId& index_set, int l) {
  const int k = index_set.cardinality();
  if (l < 0 || l >= k)
    fail(ErrorKind::domain,
         "need 0 <= l < |I|, got l=" + std::to_string(l) + ", |I|=" + std::to_string(k));
  std::vector<int> positions;
  for (int e : index_set.elements()) positions.push_back(e - 1);
  std::vector<SubsetId> out;
  for (auto bits : combinations(positions, l)) out.push_back({bits, index_set.m});
  return out;
}

std::vector<SubsetId> enumerate_powerset(int m) {
  require_ground_set(m, kMaxEnumerationM);
  const std::uint64_t n = std::uint64_t{1} << m;
  std::vector<SubsetId> out;
  out.reserve(n);
  for (std::uint64_t b = 0; b < n; ++b) out.push_back({b, m});
  return out;
}

SubsetIndex::SubsetIndex(int m) : m_(m) {
  require_ground_set(m, kMaxEnumerationM);
  global_of_mask_.assign(std::size_t{1} << m, -1);
  offsets_.assign(m + 2, 0);
  order_.reserve((std::size_t{1} << m) - 1);
  for (int k = 1; k <= m; ++k) {
    offsets_[k] = static_cast<int>(order_.size());
    for (const auto& s : enumerate_sk(m, k)) {
      global_of_mask_[s.bits] = static_cast<int>(order_.size());
      order_.push_back(s.bits);
    }
  }
  offsets_[m + 1] = static_cast<int>(order_.size());
}

SubsetIndex::Position SubsetIndex::forward(const SubsetId& subset) const {
  if (subset.m != m_) fail(ErrorKind::domain, "subset over a different ground set");
  if (subset.bits == 0 || subset.bits > full_mask(m_))
    fail(ErrorKind::domain, "subset must be nonempty and inside the ground set");
  const int g = global_of_mask_[subset.bits];
  const int k = subset.cardinality();
  return {k, g - offsets_[k], g};
}

SubsetId SubsetIndex::backward(int global) const {
  if (global < 0 || global >= size()) fail(ErrorKind::domain, "global position out of range");
  return {order_[global], m_};
}

}  // namespace dppgeo
