#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "wrlda/errors.hpp"
#include "wrlda/eval.hpp"

using namespace wrlda;

namespace {

TopicProportions from_rows(const std::vector<testing::Dist>& rows) {
  TopicProportions m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < rows[r].size(); ++k) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
    }
  }
  return m;
}

std::vector<testing::Dist> random_rows(std::size_t n, std::size_t k, testing::Rng& rng, double conc) {
  std::vector<testing::Dist> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(testing::sample_dirichlet(std::vector<double>(k, conc), rng));
  return rows;
}

}  // namespace

TEST_CASE("KL divergence") {
  const std::vector<double> p{0.2, 0.5, 0.3};
  CHECK(kl_divergence(p, p) == 0.0);
  const std::vector<double> a{1.0, 0.0}, half{0.5, 0.5};
  // The 1e-12 floor perturbs the exact value by about 3e-11.
  CHECK(kl_divergence(a, half) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  const std::vector<double> x{0.8, 0.2}, y{0.2, 0.8};
  const double xy = kl_divergence(x, y);
  CHECK(xy == doctest::Approx(0.6 * std::log(4.0)).epsilon(1e-14));
  // Symmetric pair chosen so the two directions differ.
  const std::vector<double> u{0.9, 0.1}, v{0.6, 0.4};
  CHECK(kl_divergence(u, v) != doctest::Approx(kl_divergence(v, u)));
  const std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(kl_divergence(p, shorter), std::invalid_argument);
  CHECK(std::isfinite(kl_divergence(half, a)));
}

TEST_CASE("tune metric examples") {
  const std::vector<testing::Dist> same(6, {0.2, 0.3, 0.5});
  const std::vector<int> labels{0, 0, 1, 1, 2, 2};
  CHECK(tune_metric_m(from_rows(same), labels) == doctest::Approx(1.0).epsilon(1e-15));

  const double e = 1e-9;
  const std::vector<testing::Dist> apart{{1 - e, e}, {1 - e, e}, {e, 1 - e}, {e, 1 - e}};
  const std::vector<int> two{0, 0, 1, 1};
  const double m = tune_metric_m(from_rows(apart), two);
  CHECK(m > 1.0);
  CHECK(m < 1.5);
  CHECK(m > 1.49);

  const std::vector<int> one{3, 3, 3, 3};
  CHECK_THROWS_AS(tune_metric_m(from_rows(apart), one), DataError);
}

TEST_CASE("tune metric prefers label-aligned proportions") {
  testing::Rng rng(14);
  std::vector<int> labels;
  std::vector<testing::Dist> aligned, random;
  for (int d = 0; d < 20; ++d) {
    const int c = d % 4;
    labels.push_back(c);
    std::vector<double> conc(4, 0.3);
    conc[static_cast<std::size_t>(c)] = 8.0;
    aligned.push_back(testing::sample_dirichlet(conc, rng));
    random.push_back(testing::sample_dirichlet(std::vector<double>(4, 1.0), rng));
  }
  CHECK(tune_metric_m(from_rows(aligned), labels) > tune_metric_m(from_rows(random), labels));
}

TEST_CASE("tune metric is invariant to relabeling classes") {
  testing::Rng rng(15);
  const auto rows = random_rows(12, 3, rng, 0.5);
  const std::vector<int> labels{0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2};
  std::vector<int> renamed;
  for (int l : labels) renamed.push_back(l == 0 ? 7 : (l == 1 ? -3 : 0));
  CHECK(tune_metric_m(from_rows(rows), labels) == tune_metric_m(from_rows(rows), renamed));
}

TEST_CASE("pair metric closed forms") {
  const std::vector<testing::Dist> rows{{0.1, 0.2, 0.3, 0.15, 0.25, 0.0}, {0.5, 0.5, 0, 0, 0, 0}};
  const auto props = from_rows(rows);
  const std::vector<std::pair<std::size_t, std::size_t>> self{{0, 0}, {1, 1}};
  const auto r = pair_metrics(props, props, self);
  CHECK(*r.l2d == 0.0);
  CHECK(*r.hd == 0.0);
  CHECK(*r.a1 == 1.0);
  CHECK(*r.a5 == 5.0);

  const auto masses = from_rows({{1.0, 0.0}, {0.0, 1.0}});
  const std::vector<std::pair<std::size_t, std::size_t>> cross{{0, 1}};
  const auto d = pair_metrics(masses, masses, cross);
  CHECK(*d.l2d == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(*d.hd == 2.0);
  CHECK(*d.a1 == 0.0);
  CHECK(*d.a5 == 2.0);  // K = 2: both topics are in each top-2 set

  CHECK_THROWS_AS(pair_metrics(props, props, {}), DataError);
  const std::vector<std::pair<std::size_t, std::size_t>> bad{{0, 5}};
  CHECK_THROWS_AS(pair_metrics(props, props, bad), DataError);
}

TEST_CASE("pair metrics match the brute-force recomputation") {
  testing::Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 9);
    auto a = random_rows(10, k, rng, 0.4);
    auto b = random_rows(10, k, rng, 0.4);
    // Exact ties exercise the tie rules.
    if (trial % 3 == 0) b[2] = a[2] = testing::Dist(k, 1.0 / static_cast<double>(k));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < 10; ++i) pairs.emplace_back(i, (i * 3 + static_cast<std::size_t>(trial)) % 10);
    const auto got = pair_metrics(from_rows(a), from_rows(b), pairs);
    const auto want = testing::oracle_pairs(a, b, pairs);
    CHECK(*got.l2d == want.l2d);
    CHECK(*got.hd == want.hd);
    CHECK(*got.a1 == want.a1);
    CHECK(*got.a5 == want.a5);
    CHECK(*got.a1 >= 0.0);
    CHECK(*got.a1 <= 1.0);
    CHECK(*got.a5 <= static_cast<double>(std::min<std::size_t>(5, k)));
    CHECK(*got.hd <= 2.0);
    CHECK(*got.l2d <= std::sqrt(2.0));
  }
}

TEST_CASE("pair metrics are invariant to permuting topics") {
  testing::Rng rng(18);
  const auto a = random_rows(8, 7, rng, 0.5);
  const auto b = random_rows(8, 7, rng, 0.5);
  std::vector<std::size_t> perm{3, 0, 6, 1, 5, 2, 4};
  auto permute = [&](const std::vector<testing::Dist>& rows) {
    std::vector<testing::Dist> out;
    for (const auto& r : rows) {
      testing::Dist p(r.size());
      for (std::size_t k = 0; k < r.size(); ++k) p[perm[k]] = r[k];
      out.push_back(p);
    }
    return out;
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < 8; ++i) pairs.emplace_back(i, 7 - i);
  const auto x = pair_metrics(from_rows(a), from_rows(b), pairs);
  const auto y = pair_metrics(from_rows(permute(a)), from_rows(permute(b)), pairs);
  CHECK(*x.l2d == doctest::Approx(*y.l2d).epsilon(1e-14));
  CHECK(*x.hd == doctest::Approx(*y.hd).epsilon(1e-14));
  CHECK(*x.a1 == *y.a1);
  CHECK(*x.a5 == *y.a5);
}

TEST_CASE("tune metric matches the brute-force recomputation") {
  testing::Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = random_rows(9, 2 + static_cast<std::size_t>(trial % 5), rng, 0.3);
    std::vector<int> labels;
    for (int d = 0; d < 9; ++d) labels.push_back((d * 7 + trial) % 3);
    CHECK(tune_metric_m(from_rows(rows), labels) == testing::oracle_m(rows, labels, kDefaultKlFloor));
  }
}

TEST_CASE("top words") {
  Vocabulary v = Vocabulary::placeholder(3);
  Matrix beta(2, 3);
  beta << 0.5, 0.3, 0.2, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  CHECK(top_words(beta, 0, 2, v) == std::vector<std::string>{"w0", "w1"});
  CHECK(top_words(beta, 0, 3, v) == std::vector<std::string>{"w0", "w1", "w2"});
  CHECK(top_words(beta, 1, 3, v) == std::vector<std::string>{"w0", "w1", "w2"});
  CHECK_THROWS_AS(top_words(beta, 2, 1, v), std::out_of_range);
  CHECK_THROWS_AS(top_words(beta, 0, 4, v), std::invalid_argument);
}

TEST_CASE("document pairs from annotations") {
  std::vector<Document> docs(5);
  for (std::size_t d = 0; d < 5; ++d) {
    docs[d].ids = {0};
    docs[d].counts = {1};
  }
  docs[0].pair = 4;
  docs[1].pair = 2;
  docs[3].pair = 4;
  docs[4].pair = 2;
  const Corpus c(Vocabulary::placeholder(1), docs);
  const auto pairs = document_pairs(c);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{0, 3});
  CHECK(pairs[1] == std::pair<std::size_t, std::size_t>{1, 4});
  docs[2].pair = 4;
  CHECK_THROWS_AS(document_pairs(Corpus(Vocabulary::placeholder(1), docs)), DataError);
  for (auto& d : docs) d.pair.reset();
  CHECK_THROWS_AS(document_pairs(Corpus(Vocabulary::placeholder(1), docs)), DataError);
}

TEST_CASE("report serialization") {
  EvalReport r;
  r.l2d = 0.5;
  r.hd = 0.25;
  r.a1 = 1.0;
  r.a5 = 3.0;
  r.pairs = 1;
  r.details.push_back({0, 1, 0.5, 0.25, true, 3});
  std::ostringstream json, csv;
  write_report_json(json, r);
  CHECK(json.str().find("\"hd\": 0.25") != std::string::npos);
  CHECK(json.str().find("m_score") == std::string::npos);
  write_pair_details_csv(csv, r);
  CHECK(csv.str() == "docA,docB,l2,hellinger,agree1,agree5\n0,1,0.5,0.25,1,3\n");
}
