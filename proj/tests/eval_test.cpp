#include "semfun/eval.hpp"

#include <doctest.h>

#include <fstream>

#include "semfun/rng.hpp"
#include "semfun/trainer.hpp"
#include "support/temp_dir.hpp"

using namespace semfun;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

Model toy_model() {
  auto vocab = Vocabulary::from_counts({{"cat", 9}, {"dog", 7}, {"chase", 5}, {"mouse", 3}});
  Model m = Model::zeros(SpaceConfig{4, 2}, LabelTable::svo(), vocab);
  return m;
}

}  // namespace

TEST_CASE("spearman hand cases") {
  std::vector<double> x{1, 2, 3, 4};
  SUBCASE("perfect monotone is 1") {
    std::vector<double> y{10, 20, 21, 40};
    CHECK(spearman(x, y) == doctest::Approx(1.0));
  }
  SUBCASE("perfect antitone is -1") {
    std::vector<double> y{8, 3, 2, 0.5};
    CHECK(spearman(x, y) == doctest::Approx(-1.0));
  }
  SUBCASE("the (1,3,2,4) permutation gives exactly 0.8") {
    std::vector<double> y{1, 3, 2, 4};
    CHECK(spearman(x, y) == doctest::Approx(0.8).epsilon(1e-15));
  }
  SUBCASE("monotone transforms leave the value unchanged") {
    std::vector<double> y{1, 3, 2, 4};
    std::vector<double> x2;
    std::vector<double> y2;
    for (double v : x) x2.push_back(std::exp(v));
    for (double v : y) y2.push_back(2.0 * v + 7.0);
    CHECK(spearman(x2, y2) == doctest::Approx(spearman(x, y)).epsilon(1e-12));
  }
}

// Fractional ranks by hand: x = (1, 2, 2, 3) -> ranks (1, 2.5, 2.5, 4);
// y = (10, 20, 30, 40) -> ranks (1, 2, 3, 4).
// Deviations from mean 2.5: x (-1.5, 0, 0, 1.5), y (-1.5, -.5, .5, 1.5).
// rho = (2.25 + 0 + 0 + 2.25) / sqrt(4.5 * 5) = 4.5 / sqrt(22.5).
TEST_CASE("spearman handles ties with fractional ranks") {
  std::vector<double> x{1, 2, 2, 3};
  std::vector<double> y{10, 20, 30, 40};
  CHECK(spearman(x, y) == doctest::Approx(4.5 / std::sqrt(22.5)).epsilon(1e-12));
}

TEST_CASE("spearman rejects degenerate input") {
  std::vector<double> x{1, 2, 3};
  std::vector<double> longer{1, 2, 3, 4};
  std::vector<double> constant{2, 2, 2};
  std::vector<double> one{1};
  CHECK_THROWS_AS(spearman(x, longer), std::invalid_argument);
  CHECK_THROWS_AS(spearman(one, one), std::invalid_argument);
  CHECK_THROWS_AS(spearman(x, constant), NumericError);
  CHECK(spearman(x, x) == doctest::Approx(1.0));
}

TEST_CASE("predicate cosine") {
  Model m = toy_model();
  Rng rng(251);
  for (int c = 0; c < m.n_preds(); ++c) {
    for (int i = 0; i < 4; ++i) m.pred_w(i, c) = rng.normal();
    m.pred_b[c] = rng.normal();
  }

  SUBCASE("self similarity is exactly 1") {
    for (int c = 0; c < m.n_preds(); ++c) {
      CHECK(predicate_cosine(c, c, m) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("symmetry and scale invariance") {
    CHECK(predicate_cosine(0, 1, m) == doctest::Approx(predicate_cosine(1, 0, m)));
    double before = predicate_cosine(0, 1, m);
    m.pred_w.col(0) *= 3.5;
    m.pred_b[0] *= 3.5;
    CHECK(predicate_cosine(0, 1, m) == doctest::Approx(before).epsilon(1e-12));
  }
  SUBCASE("orthogonal parameter vectors give 0") {
    m.pred_w.col(0) << 1.0, 0.0, 0.0, 0.0;
    m.pred_b[0] = 0.0;
    m.pred_w.col(1) << 0.0, 1.0, 0.0, 0.0;
    m.pred_b[1] = 0.0;
    CHECK(predicate_cosine(0, 1, m) == doctest::Approx(0.0));
  }
  SUBCASE("zero vectors are an error") {
    m.pred_w.col(0).setZero();
    m.pred_b[0] = 0.0;
    CHECK_THROWS_AS(predicate_cosine(0, 1, m), NumericError);
  }
  SUBCASE("the bias coordinate is a switch") {
    m.pred_w.col(0) << 1.0, 0.0, 0.0, 0.0;
    m.pred_b[0] = 2.0;
    m.pred_w.col(1) << 0.0, 1.0, 0.0, 0.0;
    m.pred_b[1] = 2.0;
    CHECK(predicate_cosine(0, 1, m, false) == doctest::Approx(0.0));
    CHECK(predicate_cosine(0, 1, m, true) == doctest::Approx(4.0 / 5.0).epsilon(1e-12));
  }
}

TEST_CASE("load_pairs") {
  testutil::TempDir tmp("pairs");
  SUBCASE("three lines make three pairs") {
    write_file(tmp.file("p.tsv"), "cat\tdog\t7.5\nchase\tdog\t2.0\ncat\tmouse\t4.25\n");
    auto ds = load_pairs(tmp.file("p.tsv"));
    REQUIRE(ds.pairs.size() == 3);
    CHECK(ds.pairs[0].word1 == "cat");
    CHECK(ds.pairs[2].gold == doctest::Approx(4.25));
    CHECK(ds.name == "p");
  }
  SUBCASE("duplicate unordered pairs error") {
    write_file(tmp.file("dup.tsv"), "cat\tdog\t7.5\ndog\tcat\t2.0\n");
    CHECK_THROWS_AS(load_pairs(tmp.file("dup.tsv")), DataError);
  }
  SUBCASE("non-numeric gold errors with the line") {
    write_file(tmp.file("bad.tsv"), "cat\tdog\t7.5\nchase\tdog\tNOPE\n");
    CHECK_THROWS_WITH_AS(load_pairs(tmp.file("bad.tsv")), doctest::Contains("line 2"), DataError);
  }
  SUBCASE("wrong field count errors") {
    write_file(tmp.file("cols.tsv"), "cat\tdog\n");
    CHECK_THROWS_AS(load_pairs(tmp.file("cols.tsv")), DataError);
  }
}

TEST_CASE("convert_simlex extracts the canonical columns") {
  testutil::TempDir tmp("simlex");
  write_file(tmp.file("SimLex.txt"),
             "word1\tword2\tPOS\tSimLex999\tconc(w1)\tconc(w2)\n"
             "old\tnew\tA\t1.58\t2.72\t2.81\n"
             "cat\tdog\tN\t7.35\t4.9\t5.0\n"
             "chase\tfollow\tV\t6.1\t2.0\t2.1\n");
  convert_simlex(tmp.file("SimLex.txt"), tmp.file("all.tsv"));
  auto all = load_pairs(tmp.file("all.tsv"));
  CHECK(all.pairs.size() == 3);
  convert_simlex(tmp.file("SimLex.txt"), tmp.file("nouns.tsv"), "N");
  auto nouns = load_pairs(tmp.file("nouns.tsv"));
  REQUIRE(nouns.pairs.size() == 1);
  CHECK(nouns.pairs[0].word1 == "cat");
  CHECK(nouns.pairs[0].gold == doctest::Approx(7.35));
  CHECK_THROWS_AS(convert_simlex(tmp.file("SimLex.txt"), tmp.file("none.tsv"), "X"), DataError);
}

TEST_CASE("evaluate") {
  Model m = toy_model();
  Rng rng(257);
  for (int c = 0; c < m.n_preds(); ++c) {
    for (int i = 0; i < 4; ++i) m.pred_w(i, c) = rng.normal();
    m.pred_b[c] = rng.normal();
  }

  SUBCASE("skips OOV pairs and counts them") {
    PairDataset ds;
    ds.name = "toy";
    ds.pairs = {{"cat", "dog", 8.0}, {"cat", "unicorn", 5.0}, {"dog", "mouse", 3.0},
                {"chase", "dog", 2.0}};
    auto report = evaluate(m, ds);
    CHECK(report.covered_pairs == 3);
    CHECK(report.skipped_pairs == 1);
    CHECK(report.covered_pairs + report.skipped_pairs == static_cast<int>(ds.pairs.size()));
    CHECK(report.scores[1].covered == false);
    CHECK(report.spearman_rho >= -1.0);
    CHECK(report.spearman_rho <= 1.0);
    CHECK(report.to_json().find("spearman_rho") != std::string::npos);
  }

  SUBCASE("model scores equal to gold give rho 1") {
    PairDataset ds;
    ds.pairs = {{"cat", "dog", predicate_cosine(0, 1, m)},
                {"cat", "chase", predicate_cosine(0, 2, m)},
                {"dog", "mouse", predicate_cosine(1, 3, m)}};
    auto report = evaluate(m, ds);
    CHECK(report.spearman_rho == doctest::Approx(1.0));
  }

  SUBCASE("all pairs OOV is an error") {
    PairDataset ds;
    ds.pairs = {{"yeti", "unicorn", 5.0}, {"yeti", "dragon", 2.0}};
    CHECK_THROWS_AS(evaluate(m, ds), DataError);
  }

  SUBCASE("fewer than two covered pairs is an error") {
    PairDataset ds;
    ds.pairs = {{"cat", "dog", 8.0}, {"yeti", "dragon", 2.0}};
    CHECK_THROWS_AS(evaluate(m, ds), DataError);
  }
}
