#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "adaptkry/datagen.hpp"
#include "adaptkry/error.hpp"
#include "adaptkry/propagation.hpp"
#include "adaptkry/rng.hpp"
#include "adaptkry/spectral.hpp"
#include "support/oracles.hpp"

using namespace adaptkry;

TEST_CASE("2-node path at tau=0.5 averages both entries") {
  const TauPropagator p(oracles::path2(), 0.5);
  const Matrix dense = p.dense();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(dense(i, j) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("tau=1 zeroes the diagonal") {
  const Graph g = random_connected_graph(25, 0.2, 3);
  const Matrix dense = TauPropagator(g, 1.0).dense();
  for (std::size_t i = 0; i < 25; ++i) CHECK(dense(i, i) == 0.0);
}

TEST_CASE("K3 at tau=1 has off-diagonal 1/2") {
  const Matrix dense = TauPropagator(oracles::triangle(), 1.0).dense();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(dense(i, j) == doctest::Approx(i == j ? 0.0 : 0.5).epsilon(1e-15));
}

TEST_CASE("CSR assembly matches the entrywise formula") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Graph g = random_connected_graph(30 + 5 * seed, 0.15, seed);
    for (double tau : {0.3, 0.8, 1.0, 1.4}) {
      const Matrix ours = TauPropagator(g, tau).dense();
      const Matrix reference = oracles::dense_tau_propagator(g, tau);
      CHECK(max_abs_diff(ours, reference) < 1e-14);
    }
  }
}

TEST_CASE("propagator rejects bad tau and isolated nodes beyond tau=1") {
  const Graph has_isolated(3, {{0, 1}}, {}, 1);
  CHECK_THROWS_AS(TauPropagator(oracles::triangle(), 0.0), validation_error);
  CHECK_THROWS_AS(TauPropagator(oracles::triangle(), -0.5), validation_error);
  CHECK_THROWS_AS(TauPropagator(has_isolated, 1.5), validation_error);
  CHECK_NOTHROW(TauPropagator(has_isolated, 0.9));
}

TEST_CASE("krylov basis blocks") {
  const Graph g = random_connected_graph(20, 0.2, 9);
  const FeatureMatrix x = random_features(20, 3, 17);
  const TauPropagator p(g, 0.7);

  SUBCASE("K=0 keeps only the features") {
    const KrylovBasis basis = build_krylov_basis(p, x, 0);
    REQUIRE(basis.num_blocks() == 1);
    CHECK(basis.blocks[0] == x);
  }
  SUBCASE("eigenvector input scales by its eigenvalue") {
    const SpectrumReport spectrum = eig_oracle(g, 0.7);
    const double lambda_p = 1.0 - spectrum.eigenvalues[3];
    FeatureMatrix vec(20, 1);
    for (std::size_t i = 0; i < 20; ++i) vec(i, 0) = spectrum.eigenvectors(i, 3);
    const KrylovBasis basis = build_krylov_basis(p, vec, 4);
    for (int k = 0; k <= 4; ++k) {
      const double scale = std::pow(lambda_p, k);
      for (std::size_t i = 0; i < 20; ++i)
        CHECK(basis.blocks[static_cast<std::size_t>(k)](i, 0) ==
              doctest::Approx(scale * vec(i, 0)).epsilon(1e-9));
    }
  }
  SUBCASE("blocks match the dense matrix-power oracle") {
    const KrylovBasis basis = build_krylov_basis(p, x, 5);
    const Matrix dense = oracles::dense_tau_propagator(g, 0.7);
    for (int k = 0; k <= 5; ++k) {
      const Matrix expected = oracles::dense_power_apply(dense, x, k);
      CHECK(max_abs_diff(basis.blocks[static_cast<std::size_t>(k)], expected) < 1e-10);
    }
  }
  SUBCASE("dimension mismatch") {
    const FeatureMatrix wrong(19, 3);
    CHECK_THROWS_AS(build_krylov_basis(p, wrong, 2), validation_error);
  }
}

TEST_CASE("merged basis") {
  const Graph g = random_connected_graph(30, 0.15, 21);
  const FeatureMatrix x = random_features(30, 4, 22);

  SUBCASE("single tau reduces to the plain basis") {
    const std::vector<double> taus = {0.8};
    const KrylovBasis merged = build_merged_basis(g, taus, x, 4);
    const KrylovBasis single = build_krylov_basis(TauPropagator(g, 0.8), x, 4);
    CHECK_FALSE(merged.merged);
    for (std::size_t k = 0; k < merged.blocks.size(); ++k)
      CHECK(merged.blocks[k] == single.blocks[k]);
  }
  SUBCASE("duplicated tau doubles every block") {
    const std::vector<double> taus = {0.8, 0.8};
    const KrylovBasis merged = build_merged_basis(g, taus, x, 3);
    const KrylovBasis single = build_krylov_basis(TauPropagator(g, 0.8), x, 3);
    CHECK(merged.merged);
    for (std::size_t k = 0; k < merged.blocks.size(); ++k)
      CHECK(max_abs_diff(merged.blocks[k], [&] {
              Matrix doubled = single.blocks[k];
              for (std::size_t i = 0; i < doubled.size(); ++i) doubled.data()[i] *= 2.0;
              return doubled;
            }()) == 0.0);
  }
  SUBCASE("three-tau merge matches summed dense powers") {
    const std::vector<double> taus = {0.5, 0.8, 1.1};
    const KrylovBasis merged = build_merged_basis(g, taus, x, 5);
    for (int k = 0; k <= 5; ++k) {
      Matrix expected(30, 4);
      for (double tau : taus) {
        const Matrix dense = oracles::dense_tau_propagator(g, tau);
        const Matrix powered = oracles::dense_power_apply(dense, x, k);
        for (std::size_t i = 0; i < expected.size(); ++i)
          expected.data()[i] += powered.data()[i];
      }
      CHECK(max_abs_diff(merged.blocks[static_cast<std::size_t>(k)], expected) < 1e-9);
    }
  }
  SUBCASE("empty tau set") {
    CHECK_THROWS_AS(build_merged_basis(g, {}, x, 2), validation_error);
  }
}

TEST_CASE("basis persistence round-trips bit-exactly") {
  const Graph g = random_connected_graph(18, 0.2, 31);
  const FeatureMatrix x = random_features(18, 5, 32);
  const std::vector<double> taus = {0.5, 1.1};
  const KrylovBasis basis = build_merged_basis(g, taus, x, 6);
  const auto path = std::filesystem::temp_directory_path() / "adaptkry_basis_roundtrip.bin";
  save_basis(basis, path);
  const KrylovBasis back = load_basis(path);
  CHECK(back.hops == basis.hops);
  CHECK(back.taus == basis.taus);
  CHECK(back.merged == basis.merged);
  REQUIRE(back.num_blocks() == basis.num_blocks());
  for (std::size_t k = 0; k < basis.num_blocks(); ++k) CHECK(back.blocks[k] == basis.blocks[k]);
  CHECK_THROWS_AS(load_basis(path.string() + ".missing"), io_error);
}

TEST_CASE("lanczos orthogonalization") {
  const Graph g = random_connected_graph(15, 0.25, 41);
  const TauPropagator p(g, 0.9);

  SUBCASE("eigenvector start breaks down at grade 1") {
    const SpectrumReport spectrum = eig_oracle(g, 0.9);
    FeatureMatrix vec(15, 1);
    for (std::size_t i = 0; i < 15; ++i) vec(i, 0) = spectrum.eigenvectors(i, 2);
    const KrylovBasis basis = build_krylov_basis(p, vec, 8);
    const LanczosResult result = orthogonalize_basis(p, basis, 0);
    CHECK(result.breakdown);
    CHECK(result.dimension == 1);
    CHECK(result.alpha[0] == doctest::Approx(1.0 - spectrum.eigenvalues[2]).epsilon(1e-9));
  }
  SUBCASE("random start gives an orthonormal span-preserving sequence") {
    const FeatureMatrix x = random_features(15, 1, 43);
    const KrylovBasis basis = build_krylov_basis(p, x, 8);
    const LanczosResult result = orthogonalize_basis(p, basis, 0);
    REQUIRE(result.dimension == 9);

    // Gram matrix within 1e-6 of the identity.
    for (int a = 0; a < result.dimension; ++a)
      for (int b = 0; b < result.dimension; ++b) {
        const double inner = dot(result.vectors[static_cast<std::size_t>(a)],
                                 result.vectors[static_cast<std::size_t>(b)]);
        CHECK(std::abs(inner - (a == b ? 1.0 : 0.0)) < 1e-6);
      }

    // span{q_0..q_j} = span{x..P^j x}: projecting P^j x onto the first j+1
    // vectors leaves no residual.
    for (int j = 0; j <= 8; ++j) {
      Matrix q(15, static_cast<std::size_t>(j) + 1);
      for (int c = 0; c <= j; ++c)
        for (std::size_t i = 0; i < 15; ++i)
          q(i, static_cast<std::size_t>(c)) = result.vectors[static_cast<std::size_t>(c)][i];
      std::vector<double> power(15);
      for (std::size_t i = 0; i < 15; ++i) power[i] = basis.blocks[static_cast<std::size_t>(j)](i, 0);
      CHECK(projection_residual(q, power) < 1e-8);
    }
  }
  SUBCASE("merged basis is rejected") {
    const FeatureMatrix x = random_features(15, 1, 44);
    const KrylovBasis merged = build_merged_basis(g, std::vector<double>{0.5, 0.9}, x, 4);
    CHECK_THROWS_AS(orthogonalize_basis(p, merged, 0), validation_error);
  }
  SUBCASE("zero start vector") {
    FeatureMatrix zero(15, 1);
    const KrylovBasis basis = build_krylov_basis(p, zero, 3);
    CHECK_THROWS_AS(orthogonalize_basis(p, basis, 0), validation_error);
  }
}

TEST_CASE("grade estimation") {
  const Graph g = random_connected_graph(10, 0.3, 51);
  const TauPropagator p(g, 0.8);
  const SpectrumReport spectrum = eig_oracle(g, 0.8);
  const std::size_t n = 10;

  SUBCASE("eigenvector has grade 1") {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = spectrum.eigenvectors(i, 4);
    CHECK(estimate_grade(p, x, 5) == 1);
  }
  SUBCASE("two eigencomponents give grade 2") {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = spectrum.eigenvectors(i, 1) + 0.5 * spectrum.eigenvectors(i, 6);
    CHECK(estimate_grade(p, x, 6) == 2);
  }
  SUBCASE("grade never exceeds the distinct eigenvalues with nonzero projection") {
    Rng rng(52);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    // Count distinct eigenvalues of P carrying signal (oracle route).
    int carrying = 0;
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      double mass = 0.0;
      while (j < n && std::abs(spectrum.eigenvalues[j] - spectrum.eigenvalues[i]) < 1e-8) {
        double proj = 0.0;
        for (std::size_t r = 0; r < n; ++r) proj += spectrum.eigenvectors(r, j) * x[r];
        mass += proj * proj;
        ++j;
      }
      if (mass > 1e-16) ++carrying;
      i = j;
    }
    const int grade = estimate_grade(p, x, static_cast<int>(n));
    CHECK(grade <= carrying);
    CHECK(grade >= 1);
  }
  SUBCASE("zero signal is rejected") {
    const std::vector<double> zero(n, 0.0);
    CHECK_THROWS_AS(estimate_grade(p, zero, 3), validation_error);
  }
}

#ifdef _OPENMP
#include <omp.h>
TEST_CASE("basis construction is bit-identical across thread counts") {
  const Graph g = random_connected_graph(200, 0.05, 71);
  const FeatureMatrix x = random_features(200, 8, 72);
  const TauPropagator p(g, 0.8);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const KrylovBasis serial = build_krylov_basis(p, x, 6);
  omp_set_num_threads(saved);
  const KrylovBasis parallel = build_krylov_basis(p, x, 6);
  for (std::size_t k = 0; k < serial.num_blocks(); ++k)
    CHECK(serial.blocks[k] == parallel.blocks[k]);
}
#endif

TEST_CASE("block norms are non-increasing for tau <= 1") {
  const Graph g = random_connected_graph(35, 0.15, 61);
  for (double tau : {0.4, 0.8, 1.0}) {
    const TauPropagator p(g, tau);
    const FeatureMatrix x = random_features(35, 1, 62);
    const KrylovBasis basis = build_krylov_basis(p, x, 12);
    for (std::size_t k = 1; k < basis.num_blocks(); ++k)
      CHECK(frobenius_norm(basis.blocks[k]) <=
            frobenius_norm(basis.blocks[k - 1]) * (1.0 + 1e-12));
  }
}
