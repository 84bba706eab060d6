#include "doctest.h"

#include "dppgeo/errors.hpp"
#include "dppgeo/lattice.hpp"

using namespace dppgeo;

namespace {
std::vector<std::vector<int>> as_lists(const std::vector<SubsetId>& subsets) {
  std::vector<std::vector<int>> out;
  for (const auto& s : subsets) out.push_back(s.elements());
  return out;
}
}  // namespace

TEST_CASE("enumerate_sk is lexicographic") {
  CHECK(as_lists(enumerate_sk(3, 2)) == std::vector<std::vector<int>>{{1, 2}, {1, 3}, {2, 3}});
  CHECK(as_lists(enumerate_sk(4, 1)) == std::vector<std::vector<int>>{{1}, {2}, {3}, {4}});
  CHECK(as_lists(enumerate_sk(4, 3)) ==
        std::vector<std::vector<int>>{{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}});
  for (int m = 1; m <= 12; ++m)
    for (int k = 1; k <= m; ++k) CHECK(enumerate_sk(m, k).size() == binomial(m, k));
}

TEST_CASE("enumerate_sk rejects out-of-range arguments") {
  CHECK_THROWS_AS(enumerate_sk(3, 0), Error);
  CHECK_THROWS_AS(enumerate_sk(3, 4), Error);
  CHECK_THROWS_AS(enumerate_sk(0, 0), Error);
  try {
    enumerate_sk(13, 2);
    FAIL("expected a capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capacity);
  }
}

TEST_CASE("sufficient statistic is the containment indicator") {
  CHECK(sufficient_stat(SubsetId::from_elements(3, {1, 2}), SubsetId::from_elements(3, {1, 2, 3})) == 1);
  CHECK(sufficient_stat(SubsetId::from_elements(3, {1, 2}), SubsetId::from_elements(3, {1, 3})) == 0);
  CHECK(sufficient_stat(SubsetId::from_elements(3, {3}), SubsetId::empty(3)) == 0);
  CHECK_THROWS_AS(sufficient_stat(SubsetId::from_elements(3, {1}), SubsetId::from_elements(4, {1})), Error);
}

TEST_CASE("sufficient statistic factorizes over elements") {
  const int m = 5;
  for (const auto& i : enumerate_powerset(m)) {
    if (i.bits == 0) continue;
    for (const auto& a : enumerate_powerset(m)) {
      int product = 1;
      for (int e : i.elements()) product *= sufficient_stat(SubsetId::from_elements(m, {e}), a);
      CHECK(sufficient_stat(i, a) == product);
    }
  }
}

TEST_CASE("proper_subsets_of_size lists lower neighbours in lex order") {
  CHECK(as_lists(proper_subsets_of_size(SubsetId::from_elements(4, {1, 2, 4}), 2)) ==
        std::vector<std::vector<int>>{{1, 2}, {1, 4}, {2, 4}});
  CHECK(proper_subsets_of_size(SubsetId::from_elements(4, {1, 2, 3, 4}), 3).size() == 4);
  CHECK(as_lists(proper_subsets_of_size(SubsetId::from_elements(4, {1, 2}), 1)) ==
        std::vector<std::vector<int>>{{1}, {2}});
  CHECK_THROWS_AS(proper_subsets_of_size(SubsetId::from_elements(4, {1, 2}), 2), Error);
}

TEST_CASE("enumerate_powerset ascends by bitmask") {
  CHECK(as_lists(enumerate_powerset(2)) == std::vector<std::vector<int>>{{}, {1}, {2}, {1, 2}});
  CHECK(enumerate_powerset(3).size() == 8);
  CHECK_THROWS_AS(enumerate_powerset(0), Error);
  CHECK_THROWS_AS(enumerate_powerset(13), Error);
}

TEST_CASE("SubsetIndex round trips and orders layers by cardinality") {
  for (int m = 1; m <= 12; ++m) {
    const SubsetIndex index(m);
    REQUIRE(index.size() == (1 << m) - 1);
    int last_k = 0;
    for (int g = 0; g < index.size(); ++g) {
      const SubsetId s = index.backward(g);
      const auto pos = index.forward(s);
      CHECK(pos.global == g);
      CHECK(pos.cardinality == s.cardinality());
      CHECK(pos.cardinality >= last_k);
      last_k = pos.cardinality;
    }
    for (int k = 1; k <= m; ++k) {
      CHECK(index.layer_size(k) == static_cast<int>(binomial(m, k)));
      const auto layer = enumerate_sk(m, k);
      for (std::size_t i = 0; i < layer.size(); ++i)
        CHECK(index.forward(layer[i]).in_layer == static_cast<int>(i));
    }
  }
}

TEST_CASE("pair_index matches the second layer") {
  for (int m = 2; m <= 8; ++m) {
    const SubsetIndex index(m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const std::uint64_t mask = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
        CHECK(index.global_of(mask) == m + pair_index(m, i, j));
      }
  }
}

TEST_CASE("SubsetId rejects labels outside the ground set") {
  CHECK_THROWS_AS(SubsetId::from_elements(3, {0}), Error);
  CHECK_THROWS_AS(SubsetId::from_elements(3, {4}), Error);
  CHECK(SubsetId::from_elements(3, {3, 1}).elements() == std::vector<int>{1, 3});
}
