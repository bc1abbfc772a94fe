#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "hce/error.hpp"
#include "hce/metrics.hpp"

using namespace hce;

namespace {

// MI of two label vectors written out from the definition.
double mi_by_hand(const std::vector<std::size_t>& u, const std::vector<std::size_t>& v) {
  const double n = static_cast<double>(u.size());
  std::map<std::size_t, double> a, b;
  std::map<std::pair<std::size_t, std::size_t>, double> c;
  for (std::size_t i = 0; i < u.size(); ++i) {
    a[u[i]] += 1;
    b[v[i]] += 1;
    c[{u[i], v[i]}] += 1;
  }
  double mi = 0.0;
  for (const auto& [ij, nij] : c) mi += nij / n * std::log(n * nij / (a[ij.first] * b[ij.second]));
  return mi;
}

long double mi_by_hand_ld(const std::vector<std::size_t>& u, const std::vector<std::size_t>& v) {
  const long double n = static_cast<long double>(u.size());
  std::map<std::size_t, long double> a, b;
  std::map<std::pair<std::size_t, std::size_t>, long double> c;
  for (std::size_t i = 0; i < u.size(); ++i) {
    a[u[i]] += 1;
    b[v[i]] += 1;
    c[{u[i], v[i]}] += 1;
  }
  long double mi = 0.0L;
  for (const auto& [ij, nij] : c) {
    mi += nij / n * std::log(n * nij / (a[ij.first] * b[ij.second]));
  }
  return mi;
}

std::vector<std::size_t> labels_from_sizes(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> l;
  for (std::size_t c = 0; c < sizes.size(); ++c) l.insert(l.end(), sizes[c], c);
  return l;
}

// Mean MI over every distinct arrangement of v's labels against fixed u;
// each arrangement is equally likely under random relabelling.
double emi_by_enumeration(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const auto u = labels_from_sizes(a);
  auto v = labels_from_sizes(b);
  // long double keeps the rounding of ~40k terms below the 1e-12 check
  long double sum = 0.0L;
  std::size_t count = 0;
  do {
    sum += mi_by_hand_ld(u, v);
    ++count;
  } while (std::next_permutation(v.begin(), v.end()));
  return static_cast<double>(sum / static_cast<long double>(count));
}

void integer_partitions(std::size_t n, std::size_t max_part, std::vector<std::size_t>& cur,
                        std::vector<std::vector<std::size_t>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (std::size_t p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    integer_partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("mutual information examples") {
  const Partition u{0, 0, 1, 1};
  CHECK(mutual_information(u, u) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(std::abs(mutual_information(u, Partition{0, 1, 0, 1})) < 1e-15);
  CHECK(mutual_information(u, Partition{0, 0, 0, 0}) == 0.0);
  CHECK(entropy(u) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(mutual_information(u, Partition{0, 1, 0}), Error);
}

TEST_CASE("contingency table") {
  const ContingencyTable t(Partition{0, 0, 1, 1, 2}, Partition{0, 1, 1, 1, 1});
  CHECK(t.total() == 5);
  CHECK(t.row_sums() == std::vector<std::size_t>{2, 2, 1});
  CHECK(t.col_sums() == std::vector<std::size_t>{1, 4});
  REQUIRE(t.cells().size() == 4);
  CHECK(t.cells()[0].count == 1);
  CHECK(t.cells()[1].count == 1);
  CHECK(t.cells()[2].count == 2);
  try {
    ContingencyTable(Partition{0, 1}, Partition{0});
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("expected MI small cases") {
  CHECK(expected_mi({4}, {2, 2}) == 0.0);
  CHECK(expected_mi({2, 2}, {2, 2}) == doctest::Approx(std::log(2.0) / 3.0).epsilon(1e-14));
  CHECK(std::abs(expected_mi({3, 3}, {2, 2, 2}) - emi_by_enumeration({3, 3}, {2, 2, 2})) < 1e-12);
}

TEST_CASE("expected MI equals exhaustive enumeration for N <= 8") {
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<std::vector<std::size_t>> parts;
    std::vector<std::size_t> cur;
    integer_partitions(n, n, cur, parts);
    for (const auto& a : parts) {
      for (const auto& b : parts) {
        CHECK(std::abs(expected_mi(a, b) - emi_by_enumeration(a, b)) < 1e-12);
      }
    }
  }
}

TEST_CASE("expected MI agrees with a permutation oracle") {
  std::mt19937_64 rng(71);
  const std::vector<std::size_t> u{0, 0, 1, 1};
  std::vector<std::size_t> v = u;
  const std::size_t shuffles = 200000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t s = 0; s < shuffles; ++s) {
    std::shuffle(v.begin(), v.end(), rng);
    const double mi = mi_by_hand(u, v);
    sum += mi;
    sq += mi * mi;
  }
  const double mean = sum / shuffles;
  const double se = std::sqrt((sq / shuffles - mean * mean) / shuffles);
  CHECK(std::abs(expected_mi({2, 2}, {2, 2}) - mean) < 3.0 * se);
}

TEST_CASE("AMI examples") {
  const Partition u{0, 0, 1, 1};
  CHECK(ami(u, u) == 1.0);
  const AmiReport r = ami_report(u, Partition{0, 1, 0, 1});
  CHECK(std::abs(r.mi) < 1e-15);
  CHECK(r.emi > 0.0);
  CHECK(r.ami == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ami(Partition{0, 0, 0}, Partition{0, 0, 0}) == 1.0);
  CHECK(ami(Partition{0, 0, 0}, Partition{0, 1, 2}) == 0.0);
  CHECK(ami(Partition{0, 1, 2, 3}, Partition{0, 1, 2, 3}) == 1.0);
}

TEST_CASE("AMI properties on random partitions") {
  std::mt19937_64 rng(73);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<std::size_t> a(n), b(n);
    const std::size_t ka = 1 + rng() % 6, kb = 1 + rng() % 6;
    for (auto& x : a) x = rng() % ka;
    for (auto& x : b) x = rng() % kb;
    const Partition u(a), v(b);
    const AmiReport r = ami_report(u, v);
    CHECK(r.mi >= -1e-12);
    CHECK(r.mi <= std::min(r.h_u, r.h_v) + 1e-12);
    CHECK(r.emi >= 0.0);
    CHECK(r.emi <= std::min(r.h_u, r.h_v) + 1e-12);
    CHECK(r.mi == doctest::Approx(mi_by_hand(a, b)).epsilon(1e-12));
    CHECK(std::abs(ami(u, v) - ami(v, u)) < 1e-12);
    CHECK(ami(u, v) <= 1.0);
    if (u.community_count() > 1) CHECK(ami(u, u) == 1.0);
    // relabelling
    std::vector<std::size_t> c = a;
    for (auto& x : c) x = 17 - x;
    CHECK(ami(Partition(c), v) == doctest::Approx(ami(u, v)).epsilon(1e-12));
  }
}

TEST_CASE("mean AMI of independent partitions is near zero") {
  std::mt19937_64 rng(79);
  double sum = 0.0;
  std::vector<std::size_t> a(200), b(200);
  for (int t = 0; t < 1000; ++t) {
    for (auto& x : a) x = rng() % 4;
    for (auto& x : b) x = rng() % 4;
    sum += ami(Partition(a), Partition(b));
  }
  CHECK(std::abs(sum / 1000.0) <= 0.05);
}

TEST_CASE("Jaccard assignment") {
  const std::vector<Region> regions{{"X", {1, 2, 3, 4, 5}}, {"Y", {3, 4}}};
  const RegionMatch m = jaccard_assign({1, 2, 3}, regions);
  CHECK(m.name == "X");
  CHECK(m.region == 0);
  CHECK(m.jaccard == doctest::Approx(0.6));
  CHECK_FALSE(m.no_overlap);
  CHECK(jaccard_assign({3, 4}, regions).name == "Y");
  CHECK(jaccard_assign({3, 4}, regions).jaccard == 1.0);
  const RegionMatch none = jaccard_assign({9, 10}, regions);
  CHECK(none.region == 0);
  CHECK(none.jaccard == 0.0);
  CHECK(none.no_overlap);
  // tie between equal regions goes to the earlier one
  const std::vector<Region> tied{{"A", {1}}, {"B", {2}}};
  CHECK(jaccard_assign({1, 2}, tied).name == "A");
  try {
    jaccard_assign({}, regions);
    FAIL("expected EmptyCommunity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCommunity);
  }
}

}  // TEST_SUITE
