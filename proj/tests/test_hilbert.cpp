#include "quni/hilbert.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace quni;

namespace {

Vector basis_word(int m, std::initializer_list<int> letters) {
  std::size_t idx = 0;
  std::size_t len = 1;
  for (int l : letters) {
    idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(l);
    len *= static_cast<std::size_t>(m);
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(len));
  v[static_cast<Eigen::Index>(idx)] = 1.0;
  return v;
}

Polynomial monomial(int m, Exponent e) {
  int deg = 0;
  for (int x : e) deg += x;
  const MonomialBasis b(m, deg);
  Polynomial p{m, deg, Vector::Zero(static_cast<Eigen::Index>(b.size()))};
  p.coeffs[static_cast<Eigen::Index>(b.index(e))] = 1.0;
  return p;
}

HilbertTable table_for(const GradedIdeal& J, int up_to) { return with_regularity(hilbert_table(J, up_to)); }

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m.diagonal() << a, b;
  return m;
}

}  // namespace

TEST(Monomials, CountAndOrder) {
  EXPECT_EQ(monomial_count(2, 3), 4u);
  EXPECT_EQ(monomial_count(3, 2), 6u);
  EXPECT_EQ(monomial_count(4, 0), 1u);
  EXPECT_EQ(monomial_count(1, 9), 1u);
  for (int m = 1; m <= 4; ++m)
    for (int j = 0; j <= 5; ++j) EXPECT_EQ(MonomialBasis(m, j).size(), monomial_count(m, j));
  const MonomialBasis b(3, 2);
  EXPECT_EQ(b[0], (Exponent{2, 0, 0}));
  EXPECT_EQ(b[1], (Exponent{1, 1, 0}));
  EXPECT_EQ(b[5], (Exponent{0, 0, 2}));
}

TEST(Symmetrize, Examples) {
  const Vector commutator = basis_word(2, {0, 1}) - basis_word(2, {1, 0});
  EXPECT_EQ(symmetrize(commutator, 2, 2).coeffs.norm(), 0.0);
  const Polynomial sq = symmetrize(basis_word(2, {0, 0}), 2, 2);
  EXPECT_EQ(sq.coeffs, monomial(2, {2, 0}).coeffs);
  const Polynomial mixed = symmetrize(basis_word(2, {0, 1}) + basis_word(2, {1, 0}), 2, 2);
  EXPECT_EQ(mixed.coeffs, 2.0 * monomial(2, {1, 1}).coeffs);
  EXPECT_THROW(symmetrize(Vector::Zero(5), 2, 2), Error);
}

TEST(Symmetrize, KillsPermutedDifferences) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 3;
    const int j = 4;
    std::vector<int> letters(j);
    std::uniform_int_distribution<int> pick(0, m - 1);
    for (auto& l : letters) l = pick(rng);
    std::vector<int> perm(letters);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto word = [&](const std::vector<int>& ls) {
      std::size_t idx = 0;
      for (int l : ls) idx = idx * m + static_cast<std::size_t>(l);
      Vector v = Vector::Zero(81);
      v[static_cast<Eigen::Index>(idx)] = 1.0;
      return v;
    };
    EXPECT_EQ(symmetrize(word(letters) - word(perm), m, j).coeffs.norm(), 0.0);
  }
}

TEST(InvariantComplement, Examples) {
  EXPECT_EQ(invariant_complement({Matrix::Identity(2, 2)}).cols(), 0);
  const Matrix c = invariant_complement({diag2(1, -1)});
  ASSERT_EQ(c.cols(), 1);
  EXPECT_NEAR(std::abs(c(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(c(0, 0)), 0.0, 1e-14);
}

TEST(InvariantComplement, DualityWithFixedSpace) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    // a random unitary with a prescribed number of eigenvalues equal to 1
    const int dim = 4;
    const Matrix q = haar_unitary(dim, rng);
    Matrix d = Matrix::Identity(dim, dim);
    const int moved = trial % (dim + 1);
    for (int i = 0; i < moved; ++i) d(i, i) = std::polar(1.0, 0.3 + i);
    const Matrix g = q * d * q.adjoint();
    const Eigen::Index comp = invariant_complement({g}).cols();
    const auto fixed = fixed_space_dim({StructuredOperator::local(dim, 1, 0, g)}).value;
    EXPECT_EQ(comp + fixed, dim);
    EXPECT_EQ(comp, moved);
  }
}

TEST(HilbertFunction, Examples) {
  const GradedIdeal x2{2, 1, {monomial(2, {0, 1})}};
  for (int N = 0; N <= 6; ++N) EXPECT_EQ(hilbert_function(x2, N), 1);
  const GradedIdeal zero{2, 1, {}};
  for (int N = 0; N <= 6; ++N) EXPECT_EQ(hilbert_function(zero, N), N + 1);
  const GradedIdeal all{2, 2, {monomial(2, {2, 0}), monomial(2, {1, 1}), monomial(2, {0, 2})}};
  EXPECT_EQ(hilbert_function(all, 0), 1);
  EXPECT_EQ(hilbert_function(all, 1), 2);
  for (int N = 2; N <= 6; ++N) EXPECT_EQ(hilbert_function(all, N), 0);
  HilbertOptions small;
  small.dense_limit = 10;
  EXPECT_THROW(hilbert_function(GradedIdeal{4, 1, {monomial(4, {1, 0, 0, 0})}}, 5, small), Error);
}

TEST(HilbertFunction, NonIncreasingUnderInclusion) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3;
    const int deg = 2;
    GradedIdeal J{m, deg, {}};
    for (int g = 0; g < 3; ++g) {
      Polynomial p{m, deg, Vector(6)};
      for (Eigen::Index i = 0; i < 6; ++i) p.coeffs[i] = cplx(n(rng), n(rng));
      GradedIdeal bigger = J;
      bigger.generators.push_back(p);
      for (int N = 0; N <= 5; ++N) EXPECT_LE(hilbert_function(bigger, N), hilbert_function(J, N));
      J = bigger;
    }
  }
}

TEST(Regularity, Examples) {
  const auto t1 = table_for(GradedIdeal{2, 1, {monomial(2, {0, 1})}}, 6);
  EXPECT_EQ(*t1.regularity, 0);
  EXPECT_EQ(*t1.dimension, 0);
  EXPECT_EQ(t1.eventual_polynomial, (std::vector<std::int64_t>{1}));

  const auto t2 = table_for(GradedIdeal{2, 1, {}}, 6);
  EXPECT_EQ(*t2.dimension, 1);
  EXPECT_EQ(*t2.regularity, 0);
  EXPECT_EQ(t2.eventual_polynomial, (std::vector<std::int64_t>{1, 1}));

  const auto t3 = table_for(GradedIdeal{2, 2, {monomial(2, {2, 0}), monomial(2, {1, 1}), monomial(2, {0, 2})}}, 6);
  EXPECT_EQ(*t3.regularity, 2);
  EXPECT_EQ(*t3.dimension, 0);
  EXPECT_TRUE(t3.eventual_polynomial.empty());
}

TEST(Regularity, FitsPolynomialTails) {
  HilbertTable t;
  // h(N) = C(N+2, 2) from N = 3 on, with junk before
  t.values = {7, 0, 5};
  for (int N = 3; N <= 9; ++N) t.values.push_back((N + 2) * (N + 1) / 2);
  const auto r = regularity_and_dimension(t);
  EXPECT_EQ(r.dimension, 2);
  EXPECT_EQ(r.regularity, 3);
  EXPECT_EQ(r.eventual_polynomial, (std::vector<std::int64_t>{1, 2, 1}));
  t.values = {1, 2};
  EXPECT_THROW(regularity_and_dimension(t), Error);
}

TEST(Regularity, GenericFormsMeetTheBound) {
  // m generic forms of degree n: the quotient vanishes from m(n−1)+1 on
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      const auto size = static_cast<Eigen::Index>(monomial_count(m, n));
      GradedIdeal J{m, n, {}};
      for (int g = 0; g < m; ++g) {
        Polynomial p{m, n, Vector(size)};
        for (Eigen::Index i = 0; i < size; ++i) p.coeffs[i] = cplx(nd(rng), nd(rng));
        J.generators.push_back(p);
      }
      const auto t = table_for(J, m * (n - 1) + 4);
      EXPECT_EQ(*t.dimension, 0);
      EXPECT_TRUE(t.eventual_polynomial.empty());
      EXPECT_EQ(*t.regularity, m * (n - 1) + 1) << "m=" << m << " n=" << n;
    }
  }
}

TEST(Correspondence, TrivialGroups) {
  for (int N = 1; N <= 6; ++N) {
    const auto id = correspondence_check({Matrix::Identity(2, 2)}, 2, 1, N);
    EXPECT_EQ(id.lhs, N + 1);
    EXPECT_EQ(id.rhs, N + 1);
    const auto z = correspondence_check({diag2(1, -1)}, 2, 1, N);
    EXPECT_EQ(z.lhs, 1);
    EXPECT_EQ(z.rhs, 1);
  }
  EXPECT_THROW(correspondence_check({Matrix::Identity(4, 4)}, 2, 2, 1), Error);
}

TEST(Correspondence, RandomGroups) {
  std::mt19937_64 rng(5);
  // W = C², one unitary on W^{⊗2}
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix g = haar_unitary(4, rng);
    for (int N = 2; N <= 5; ++N) {
      const auto c = correspondence_check({g}, 2, 2, N);
      EXPECT_EQ(c.lhs, c.rhs) << "N=" << N;
    }
  }
  // W = C⁴, one unitary on W
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix g = haar_unitary(4, rng);
    for (int N = 1; N <= 4; ++N) {
      const auto c = correspondence_check({g}, 4, 1, N);
      EXPECT_EQ(c.lhs, c.rhs) << "N=" << N;
    }
  }
  // structured groups with nontrivial invariants
  const Matrix swap = *builtin_gate_matrix("SWAP", 2);
  const Matrix cz = *builtin_gate_matrix("CZ", 2);
  for (const auto& ops : std::vector<std::vector<Matrix>>{{swap}, {cz}, {swap, cz}}) {
    for (int N = 2; N <= 5; ++N) {
      const auto c = correspondence_check(ops, 2, 2, N);
      EXPECT_EQ(c.lhs, c.rhs) << "N=" << N;
    }
  }
}

TEST(IdealFiles, RoundTrip) {
  const std::string text = R"({"m":2,"n":2,"generators":[
      {"monomial_exponents_to_coeff":[[[2,0],[1,0]],[[0,2],[0,-1]]]},
      {"monomial_exponents_to_coeff":[[[1,1],[2.5,0]]]}]})";
  const GradedIdeal J = parse_ideal(text);
  ASSERT_EQ(J.generators.size(), 2u);
  EXPECT_EQ(J.generators[0].coeffs[2], cplx(0.0, -1.0));
  const GradedIdeal again = ideal_from_json(ideal_to_json(J));
  for (std::size_t i = 0; i < J.generators.size(); ++i) EXPECT_EQ(again.generators[i].coeffs, J.generators[i].coeffs);
  EXPECT_THROW(parse_ideal(R"({"m":2,"n":2,"generators":[{"monomial_exponents_to_coeff":[[[1,0],[1,0]]]}]})"), Error);
  EXPECT_THROW(parse_ideal("{"), Error);
  EXPECT_THROW(parse_ideal(R"({"m":2})"), Error);
}
