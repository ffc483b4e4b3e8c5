#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "symcanon/error.hpp"
#include "symcanon/harness_io.hpp"
#include "test_util.hpp"

using namespace symcanon;

TEST_CASE("malformed JSON reports the byte offset") {
  try {
    parse_json("{\"a\": ]");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() == 7);
    CHECK(std::string(e.what()).find("at byte 7") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_json(""), ParseError);
}

TEST_CASE("doubles round-trip exactly") {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<double>(i % 40) - 20.0);
    REQUIRE(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  const Json j = parse_json(Json(0.1 + 0.2).dump());
  CHECK(j.get<double>() == 0.1 + 0.2);
}

TEST_CASE("rotation, symmetry and pose records round-trip") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Rotation r = random_rotation(rng);
    REQUIRE(rotation_from_json(parse_json(to_json(r).dump())) == r);
  }
  const Rotation aa = rotation_from_json(parse_json(R"({"axis":[0,0,2],"angle_rad":1.5707963267948966})"));
  CHECK(testutil::max_abs_diff(aa, testutil::rz(kPi / 2)) < 1e-15);
  CHECK_THROWS_AS(rotation_from_json(parse_json("[1,0,0,0,1,0,0,0]")), InvalidArgument);
  CHECK_THROWS_AS(rotation_from_json(parse_json("[2,0,0,0,1,0,0,0,1]")), InvalidArgument);
  CHECK_THROWS_AS(rotation_from_json(parse_json("\"identity\"")), InvalidArgument);

  for (const auto& s : {SymmetrySpec::none(), SymmetrySpec::sphere(), SymmetrySpec::cyclic(UnitAxis(0, 1, 1), 3),
                        SymmetrySpec::revolution(UnitAxis::x()),
                        SymmetrySpec::multi_axis({{UnitAxis::z(), 4}, {UnitAxis::x(), 2}})}) {
    const Json j = parse_json(to_json(s).dump());
    CHECK(to_json(symmetry_from_json(j)) == to_json(s));
  }
  CHECK_THROWS_AS(symmetry_from_json(parse_json(R"({"kind":"helix"})")), InvalidArgument);
  CHECK_THROWS_AS(symmetry_from_json(parse_json(R"({"kind":"cyclic","axis":[0,0,1],"order":2.5})")),
                  InvalidArgument);
  CHECK_THROWS_AS(symmetry_from_json(parse_json(R"({"kind":"cyclic","axis":[0,0,0],"order":2})")),
                  InvalidArgument);

  const RigidMotion m{random_rotation(rng), {0.25, -1.0 / 3.0, 7.0}};
  const RigidMotion back = motion_from_json(parse_json(to_json(m).dump()));
  CHECK(back.r == m.r);
  CHECK(back.t == m.t);
}

TEST_CASE("run configuration round-trips and validates") {
  const RunConfig def = run_config_from_json(Json::object());
  CHECK(def.scene.landmarks.size() == 8);
  CHECK(def.modes.size() == 3);
  const RunConfig again = run_config_from_json(parse_json(to_json(def).dump()));
  CHECK(to_json(again).dump() == to_json(def).dump());

  const RunConfig file = run_config_from_json(parse_json(read_file(SYMCANON_CONFIG_DIR "/harness.json")));
  CHECK(file.harness.epochs == 150);
  CHECK(file.scene.symmetry.kind() == SymmetryKind::cyclic);
  CHECK_NOTHROW(run_config_from_json(parse_json(read_file(SYMCANON_CONFIG_DIR "/revolution.json"))));

  CHECK_THROWS_AS(run_config_from_json(parse_json(R"({"harness":{"epochs":0}})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(parse_json(R"({"harness":{"learning_rate":-1}})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(parse_json(R"({"version":2})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(parse_json(R"({"modes":["raw","fancy"]})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(parse_json(R"({"seed":-3})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(parse_json(R"({"translation":{"z_min":0.2}})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(parse_json("[]")), InvalidArgument);
}

TEST_CASE("weights round-trip and reproduce inference") {
  Scene sc;
  sc.landmarks = {{0.9, 0.3, 0.35}, {-0.2, 0.55, -0.3}, {0.4, -0.1, 0.1}};
  HarnessParams p;
  p.epochs = 2;
  p.hidden = {8};
  p.train_samples = 200;
  p.val_samples = 50;
  const TrainResult r = run_harness(Mode::map_prime, sc, p, 1);
  const std::string text = weights_to_json(r.model).dump(2);
  const TrainedModel back = weights_from_json(parse_json(text));
  CHECK(weights_to_json(back).dump(2) == text);

  const Dataset d = make_dataset(sc, 50, 5);
  const auto a = evaluate(r.model, sc, d, Exec::serial);
  const auto b = evaluate(back, sc, d, Exec::serial);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(a[i].rms_px == b[i].rms_px);
    CHECK(a[i].rot_err == b[i].rot_err);
    CHECK(a[i].predicted_region == b[i].predicted_region);
  }

  Json bad = weights_to_json(r.model);
  bad["regressors"][0]["params"].erase(0);
  CHECK_THROWS_AS(weights_from_json(bad), InvalidArgument);
  bad = weights_to_json(r.model);
  bad["feature_scale"].erase(0);
  CHECK_THROWS_AS(weights_from_json(bad), InvalidArgument);
  bad = weights_to_json(r.model);
  bad["format"] = "other";
  CHECK_THROWS_AS(weights_from_json(bad), InvalidArgument);
}

TEST_CASE("report CSV leaves missing fields empty") {
  HarnessReport rep;
  rep.epochs.push_back({1, 0.5, 2.25, std::nullopt, std::nullopt});
  rep.epochs.push_back({2, 0.25, 1.5, 0.125, 0.75});
  CHECK(report_csv(rep) == "epoch,loss,val_rms_px,val_rot_err_rad,clf_acc\n1,0.5,2.25,,\n2,0.25,1.5,0.125,0.75\n");
}

TEST_CASE("atomic writes replace the file and leave no temporary") {
  const auto dir = std::filesystem::temp_directory_path() / "symcanon_test_io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.json").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_file(path) == "second");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  CHECK_THROWS_AS(read_file((dir / "missing.json").string()), InvalidArgument);
  std::filesystem::remove_all(dir);
}
