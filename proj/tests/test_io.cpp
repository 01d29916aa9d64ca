#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scl/io.hpp"
#include "scl/spectrum.hpp"

using namespace scl;
using Catch::Approx;

TEST_CASE("spectrum CSV is deterministic and round-trips at full precision", "[io]") {
  std::vector<SpectrumRecord> recs{{-17.25000000000001, 3, 2, 1e-12, Provenance::oracle},
                                   {0.1234567890123456789, 0, 1, 0.0, Provenance::fem},
                                   {800.0000000001, 40, 2, 3.2e-11, Provenance::oracle}};
  std::ostringstream a, b;
  write_spectrum_csv(a, recs);
  write_spectrum_csv(b, recs);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("lambda,n,multiplicity,residual,provenance\n", 0) == 0);

  auto dir = std::filesystem::temp_directory_path() / "scl_io_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "spectrum.csv").string();
  write_spectrum_csv(path, recs);
  auto back = read_spectrum_csv(path);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].lambda == recs[i].lambda);  // 17 significant digits: bitwise
    CHECK(back[i].n == recs[i].n);
    CHECK(back[i].multiplicity == recs[i].multiplicity);
    CHECK(back[i].provenance == recs[i].provenance);
  }
}

TEST_CASE("run manifests validate their outputs", "[io]") {
  auto dir = std::filesystem::temp_directory_path() / "scl_manifest_test";
  std::filesystem::create_directories(dir);
  auto out_file = (dir / "data.csv").string();
  std::ofstream(out_file) << "lambda\n1.0\n";

  RunManifest manifest;
  manifest.command = "oracle";
  manifest.parameters = {{"lambda_max", 100.0}};
  manifest.config_snapshot = {{"geometry", {{"rz", 1.0}, {"ry", 2.0}}}};
  manifest.outputs = {out_file};
  manifest.wall_seconds = 1.25;
  auto manifest_path = (dir / "manifest.json").string();
  manifest.write(manifest_path);

  auto read_back = RunManifest::read(manifest_path);
  CHECK(read_back.command == "oracle");
  CHECK(read_back.version == version_string);
  CHECK(read_back.outputs_valid());

  std::filesystem::remove(out_file);
  CHECK_FALSE(read_back.outputs_valid());

  std::ofstream(out_file);  // empty file also fails validation
  CHECK_FALSE(read_back.outputs_valid());
}

TEST_CASE("high-precision formatter emits shortest faithful decimals", "[io]") {
  CHECK(format_g17(0.5) == "0.5");
  double x = 1.0 / 3.0;
  double y = std::stod(format_g17(x));
  CHECK(x == y);
}
