#include <doctest.h>

#include "cczsim/device.hpp"
#include "cczsim/hamiltonian.hpp"

using namespace ccz;

TEST_CASE("reference device layout") {
  auto d = DeviceModel::reference();
  CHECK(d.hilbert_dim() == 243);
  CHECK(d.transmon(Site::Q2).frequency_ghz == doctest::Approx(4.896));
  CHECK(d.couplings().g(Site::Q2, Site::Q1) == doctest::Approx(5.0));
  CHECK(d.couplings().g(Site::Q1, Site::C2) == 0.0);
  CHECK(d.with_levels(2).hilbert_dim() == 32);
}

TEST_CASE("site helpers") {
  CHECK(parse_site("C2") == Site::C2);
  CHECK_THROWS_AS(parse_site("Q4"), ConfigError);
  CHECK(is_coupler(Site::C1));
  CHECK_FALSE(is_coupler(Site::Q3));
  CHECK(qubit_number(Site::Q3) == 2);
  CHECK_THROWS_AS(qubit_number(Site::C1), InvalidArgument);
  CHECK(qubit_site(1) == Site::Q2);
}

TEST_CASE("coupling graph rejects self edges and stays symmetric") {
  CouplingGraph g;
  CHECK_THROWS_AS(g.set(Site::Q1, Site::Q1, 1.0), InvalidArgument);
  g.set(Site::Q1, Site::C1, 2.0);
  g.set(Site::C1, Site::Q1, 3.0);
  CHECK(g.edges().size() == 1);
  CHECK(g.g(Site::Q1, Site::C1) == 3.0);
}

TEST_CASE("transmon ordering and levels are validated") {
  auto t = DeviceModel::reference().transmons();
  std::swap(t[0], t[1]);
  CHECK_THROWS_AS(DeviceModel(t, CouplingGraph{}), ConfigError);
  CHECK_THROWS_AS(DeviceModel::reference().with_levels(1), InvalidDimension);
}

TEST_CASE("noise validation") {
  auto n = NoiseSpec::reference();
  CHECK_NOTHROW(n.validate());
  n.t1_us[Site::Q1] = 0.0;
  CHECK_THROWS_AS(n.validate(), ConfigError);
  n = NoiseSpec::reference();
  n.readout_f0[Site::Q2] = 1.2;
  CHECK_THROWS_AS(n.validate(), ConfigError);
}

TEST_CASE("config json round trip") {
  DeviceConfig cfg{DeviceModel::reference().with_couplers(6.1, 6.3), NoiseSpec::reference()};
  auto back = parse_device_config(device_config_to_json(cfg));
  for (int i = 0; i < kNumSites; ++i) {
    auto s = static_cast<Site>(i);
    CHECK(back.device.transmon(s).frequency_ghz == cfg.device.transmon(s).frequency_ghz);
    CHECK(back.device.transmon(s).anharmonicity_mhz == cfg.device.transmon(s).anharmonicity_mhz);
    CHECK(back.noise.t1_us.at(s) == cfg.noise.t1_us.at(s));
  }
  CHECK(back.device.couplings().g(Site::Q1, Site::Q3) == 0.3);
}

TEST_CASE("bundled config matches the built-in reference") {
  auto cfg = load_device_config(CCZSIM_SOURCE_DIR "/configs/reference_device.json");
  auto ref = DeviceModel::reference();
  for (int i = 0; i < kNumSites; ++i) {
    auto s = static_cast<Site>(i);
    CHECK(cfg.device.transmon(s).frequency_ghz == ref.transmon(s).frequency_ghz);
  }
  for (const auto& e : ref.couplings().edges()) CHECK(cfg.device.couplings().g(e.a, e.b) == e.g_mhz);
}

TEST_CASE("malformed configs raise config errors") {
  CHECK_THROWS_AS(parse_device_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_device_config(R"({"qubits": [], "couplers": [], "couplings": []})"), ConfigError);
  CHECK_THROWS_AS(load_device_config("/nonexistent/device.json"), ConfigError);
}

TEST_CASE("annihilation operator") {
  auto a = annihilation_operator(3);
  CHECK(std::abs(a(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(a(1, 2) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(a(1, 0)) == 0.0);
  CMat n = a.adjoint() * a;
  for (int k = 0; k < 3; ++k) CHECK(n(k, k).real() == doctest::Approx(k));
}

TEST_CASE("embedded number operator trace") {
  auto d = DeviceModel::reference();
  auto a = annihilation_operator(3);
  CMat n = embed_operator(a.adjoint() * a, Site::Q2, d);
  // (0 + 1 + 2) times 3^4 identity copies
  CHECK(n.trace().real() == doctest::Approx(243.0));
}

TEST_CASE("single transmon spectrum") {
  std::array<TransmonSpec, kNumSites> t{{
      {Site::Q1, 5.0, -200.0, 3},
      {Site::C1, 6.0, -300.0, 2},
      {Site::Q2, 5.0, -200.0, 2},
      {Site::C2, 6.0, -300.0, 2},
      {Site::Q3, 5.0, -200.0, 2},
  }};
  DeviceModel d(t, CouplingGraph{});
  CMat h = build_bare_hamiltonian(d);
  // Q1 levels with everything else in ground: indices 0, 16, 32
  CHECK(h(0, 0).real() == doctest::Approx(0.0));
  CHECK(h(16, 16).real() == doctest::Approx(ghz_to_angular(5.0)));
  CHECK(h(32, 32).real() == doctest::Approx(ghz_to_angular(9.8)));
}

TEST_CASE("bare energy of |111>") {
  auto d = DeviceModel::reference();
  FockSpace space(d);
  auto diag = bare_diagonal(d, space);
  long i = space.computational_index(1, 1, 1);
  CHECK(angular_to_ghz(diag(i)) == doctest::Approx(14.936).epsilon(1e-12));
}

TEST_CASE("interaction is Hermitian and RWA conserves excitations") {
  auto d = DeviceModel::reference().with_couplers(6.2, 6.0);
  CMat h0 = build_bare_hamiltonian(d);
  CMat vf = build_interaction(d, Frame::full);
  CMat vr = build_interaction(d, Frame::rwa);
  CHECK((vf - vf.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((vr - vr.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  CMat ntot = CMat::Zero(243, 243);
  auto a = annihilation_operator(3);
  for (int s = 0; s < kNumSites; ++s) ntot += embed_operator(a.adjoint() * a, static_cast<Site>(s), d);
  CMat h = h0 + vr;
  CHECK((h * ntot - ntot * h).cwiseAbs().maxCoeff() < 1e-9);
  CMat hf = h0 + vf;
  CHECK((hf * ntot - ntot * hf).cwiseAbs().maxCoeff() > 1.0);

  // number-conserving blocks of the two frames coincide
  for (int i = 0; i < 243; ++i)
    for (int j = 0; j < 243; ++j)
      if (std::abs(ntot(i, i) - ntot(j, j)) < 0.5) CHECK(std::abs(vf(i, j) - vr(i, j)) < 1e-12);
}

TEST_CASE("capped Fock space and sparse interaction agree with dense") {
  auto d = DeviceModel::reference();
  FockSpace full(d);
  CHECK(full.dim() == 243);
  FockSpace capped(d, 3);
  CHECK(capped.dim() == 51);
  for (std::size_t i = 0; i < capped.dim(); ++i) CHECK(capped.excitations(i) <= 3);
  CHECK(capped.index_of({2, 2, 0, 0, 0}) == -1);
  CHECK(capped.computational_indices()[7] == capped.computational_index(1, 1, 1));

  CMat dense = build_interaction(d, Frame::rwa);
  CMat sparse = CMat(interaction_sparse(d, full, Frame::rwa));
  CHECK((dense - sparse).cwiseAbs().maxCoeff() < 1e-12);
}
