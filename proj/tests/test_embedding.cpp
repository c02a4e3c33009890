#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mbinet/embedding.hpp"
#include "mbinet/error.hpp"
#include "support/helpers.hpp"

using namespace mbinet;

TEST_CASE("mock provider is deterministic and correctly framed") {
  ProviderSpec spec;
  spec.kind = ProviderKind::Mock;
  spec.dim = 32;
  spec.seed = 5;
  auto prov = make_provider(spec);
  std::vector<double> sig = testsup::noise(16000, 21, 0.5);

  EmbeddingFrames a = prov->embed(sig, "u1");
  EmbeddingFrames b = prov->embed(sig, "u1");
  CHECK(a.frames() == 49);  // 1 + (16000-400)/320
  CHECK(a.dim() == 32);
  CHECK(a.native_hop_s == doctest::Approx(320.0 / 16000.0).epsilon(1e-12));
  CHECK(a.values == b.values);
  CHECK(a.values.allFinite());
  CHECK(a.values.cwiseAbs().maxCoeff() <= 1.0);  // tanh range

  ProviderSpec other = spec;
  other.seed = 6;
  EmbeddingFrames c = make_provider(other)->embed(sig, "u1");
  CHECK(a.values != c.values);

  std::vector<double> sig2 = testsup::noise(16000, 22, 0.5);
  EmbeddingFrames d = prov->embed(sig2, "u1");
  CHECK(a.values != d.values);
}

TEST_CASE("mock frame count follows the window and hop arithmetic") {
  ProviderSpec spec;
  spec.kind = ProviderKind::Mock;
  spec.dim = 8;
  auto prov = make_provider(spec);
  for (std::size_t n : {400u, 401u, 719u, 720u, 721u, 4000u}) {
    EmbeddingFrames e = prov->embed(testsup::noise(n, n, 0.5), "u");
    Eigen::Index want =
        n >= std::size_t(kMockWindow)
            ? 1 + Eigen::Index((n - kMockWindow) / kMockHop)
            : 1;
    CHECK(e.frames() == want);
  }
}

TEST_CASE("fixture file layout is exactly EMB1 header plus float32 payload") {
  EmbeddingFrames e;
  e.values.resize(2, 3);
  e.values << 1, 2, 3, 4, 5, 6;
  std::vector<unsigned char> bytes = encode_fixture(e);
  REQUIRE(bytes.size() == 4 + 4 + 4 + 24);
  CHECK(bytes[0] == 'E');
  CHECK(bytes[1] == 'M');
  CHECK(bytes[2] == 'B');
  CHECK(bytes[3] == '1');
  CHECK(bytes[4] == 2);  // T_e little-endian
  CHECK(bytes[8] == 3);  // D little-endian

  EmbeddingFrames back = decode_fixture(bytes, "mem");
  CHECK(back.values == e.values);
}

TEST_CASE("fixture roundtrip through the provider") {
  testsup::TempDir dir;
  ProviderSpec mock;
  mock.kind = ProviderKind::Mock;
  mock.dim = 16;
  mock.seed = 3;
  std::vector<double> sig = testsup::noise(8000, 30, 0.5);
  EmbeddingFrames made = make_provider(mock)->embed(sig, "utt.L");
  write_fixture(dir.path(), "utt.L", made);

  ProviderSpec fix;
  fix.kind = ProviderKind::Fixture;
  fix.dim = 16;
  fix.fixture_dir = dir.path();
  auto prov = make_provider(fix);
  EmbeddingFrames got = prov->embed(sig, "utt.L");
  // float32 storage quantizes; roundtrip through a second write is exact
  CHECK((got.values - made.values).cwiseAbs().maxCoeff() < 1e-6);
  write_fixture(dir.path(), "again", got);
  EmbeddingFrames twice = read_fixture(dir.path(), "again");
  CHECK(twice.values == got.values);
}

TEST_CASE("fixture validation failures") {
  testsup::TempDir dir;
  ProviderSpec fix;
  fix.kind = ProviderKind::Fixture;
  fix.dim = 4;
  fix.fixture_dir = dir.path();
  auto prov = make_provider(fix);

  try {
    prov->embed({0.0}, "absent");
    FAIL("missing fixture accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FixtureMissing);
  }

  EmbeddingFrames e;
  e.values = Eigen::MatrixXd::Zero(2, 2);
  e.values(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(write_fixture(dir.path(), "nan", e), Error);

  EmbeddingFrames ok;
  ok.values = Eigen::MatrixXd::Zero(3, 8);
  write_fixture(dir.path(), "wide", ok);
  try {
    prov->embed({0.0}, "wide");  // provider dim is 4, file is 8
    FAIL("dim disagreement accepted");
  } catch (const Error& e2) {
    CHECK(e2.kind() == ErrorKind::DimensionMismatch);
  }

  std::vector<unsigned char> junk = {'E', 'M', 'B', '1', 1, 0, 0, 0};
  CHECK_THROWS_AS(decode_fixture(junk, "mem"), Error);
  std::vector<unsigned char> wrong = encode_fixture(ok);
  wrong[3] = '2';
  CHECK_THROWS_AS(decode_fixture(wrong, "mem"), Error);
}

TEST_CASE("align_to_grid identity, constants, and the worked upsample") {
  EmbeddingFrames e;
  e.values.resize(2, 1);
  e.values << 0.0, 1.0;
  Eigen::MatrixXd up = align_to_grid(e, 3);
  REQUIRE(up.rows() == 3);
  CHECK(up(0, 0) == 0.0);
  CHECK(up(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(up(2, 0) == 1.0);

  EmbeddingFrames c;
  c.values = Eigen::MatrixXd::Constant(5, 3, 0.7);
  Eigen::MatrixXd stretched = align_to_grid(c, 11);
  CHECK((stretched.array() - 0.7).abs().maxCoeff() < 1e-12);

  EmbeddingFrames id;
  id.values = Eigen::MatrixXd::Random(7, 4);
  CHECK(align_to_grid(id, 7) == id.values);

  Eigen::MatrixXd down = align_to_grid(id, 3);
  CHECK(down.rows() == 3);
  CHECK(down.row(0) == id.values.row(0));
  CHECK(down.row(2) == id.values.row(6));

  CHECK_THROWS_AS(align_to_grid(id, 0), Error);
}
