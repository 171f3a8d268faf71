#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "wgapdc/config.hpp"
#include "wgapdc/io.hpp"
#include "wgapdc/scenarios.hpp"

using namespace wgapdc;

TEST(Config, DefaultsRoundTrip) {
  const RunConfig c;
  EXPECT_EQ(parse_config(serialize(c)), c);
}

TEST(Config, EveryPresetRoundTrips) {
  for (const auto& name : scenario_names()) {
    const RunConfig c = scenario_preset(name);
    EXPECT_EQ(c.scenario, name);
    EXPECT_EQ(parse_config(serialize(c)), c) << name;
    EXPECT_NO_THROW(c.validate()) << name;
  }
}

TEST(Config, RoundTripRandomValues) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    RunConfig c;
    c.pump_wavelength_nm = 770.0 + 10.0 * u(rng);
    c.pump_fwhm_nm = 0.01 + u(rng);
    c.length_m = 0.01 + 0.05 * u(rng);
    c.channel_count = 3 + static_cast<int>(60 * u(rng));
    c.coupling_constant_per_m = u(rng) < 0.5 ? std::optional<double>{} : std::optional<double>{1000 * u(rng)};
    c.pump_k_window = KWindowConfig{u(rng) - 0.5, 0.1 + u(rng), u(rng), -u(rng), u(rng) * 3};
    c.filter = FilterConfig{1400 + u(rng), 1500 + u(rng), 1450 + u(rng), 1600 + u(rng)};
    c.smoothing_nm = u(rng) * 10;
    c.out_dir = "out dir: #" + std::to_string(i);
    ASSERT_EQ(parse_config(serialize(c)), c) << serialize(c);
  }
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    (void)parse_config("scenario: custom\nchannel_count: 41\npump_wavelenght_nm: 775\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("pump_wavelenght_nm"), std::string::npos) << msg;
  }
}

TEST(Config, TypeErrorReportsLine) {
  try {
    (void)parse_config("length_m: 0.04\nchannel_count: many\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Config, InvariantViolations) {
  EXPECT_THROW((void)parse_config("channel_count: 2\n"), ConfigError);
  EXPECT_THROW((void)parse_config("pump_fwhm_nm: -1\n"), ConfigError);
  EXPECT_THROW((void)parse_config("grid_lambda_min_nm: 1800\ngrid_lambda_max_nm: 1300\n"), ConfigError);
  EXPECT_THROW((void)parse_config("scenario: fig99\n"), ConfigError);
  EXPECT_THROW((void)parse_config("[1, 2]\n"), ConfigError);
  EXPECT_THROW((void)load_yaml("a: [1, 2\n"), ConfigError);
}

TEST(Config, OverridesIncludingDotted) {
  YAML::Node n = load_yaml(serialize(scenario_preset("fig4_phase_engineering")));
  apply_overrides(n, {"channel_count=21", "pump_k_window.c1=3", "smoothing_nm=2"});
  const RunConfig c = config_from_node(n);
  EXPECT_EQ(c.channel_count, 21);
  ASSERT_TRUE(c.pump_k_window);
  EXPECT_EQ(c.pump_k_window->c1, 3.0);
  EXPECT_EQ(c.smoothing_nm, 2.0);
  EXPECT_THROW(apply_overrides(n, {"novalue"}), ConfigError);
}

TEST(Config, FitAppliedToMaterial) {
  RunConfig c;
  c.fit_qpm = FitTarget{1549.8, 1549.8, 774.9};
  EXPECT_NEAR(c.material().qpm_period, 1.8353521949564924e-5, 1e-18);
}

TEST(Io, FormatDoubleShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1.8353521949564924e-5, -2.5e300, 0.0}) EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(Io, Sha256KnownVector) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, TensorContainerRoundTrip) {
  const auto t = normalize(wgapdc::testing::build(wgapdc::testing::small_case(5, 7, 3.0)));
  const std::string bytes = io::encode_tensor(t);
  EXPECT_EQ(bytes.substr(0, 8), "WGAJSA01");
  const auto back = io::decode_tensor(bytes);
  EXPECT_EQ(back.grid(), t.grid());
  EXPECT_EQ(back.values(), t.values());
  EXPECT_EQ(back.is_normalized(), t.is_normalized());
}

TEST(Io, TensorContainerRejectsCorruption) {
  const auto t = wgapdc::testing::build(wgapdc::testing::small_case(5, 7, 3.0));
  std::string bytes = io::encode_tensor(t);
  EXPECT_THROW((void)io::decode_tensor(bytes.substr(0, bytes.size() - 3)), ConfigError);
  bytes[0] = 'X';
  EXPECT_THROW((void)io::decode_tensor(bytes), ConfigError);
}

TEST(Io, MatrixCsvLayout) {
  Array2<double> m(2, 3);
  m(1, 2) = 0.5;
  const std::string csv = io::matrix_csv(m, {"n_s", "channel", {-1, 1}}, {"n_i", "channel", {-1, 0, 1}}, "gamma_n");
  EXPECT_NE(csv.find("n_s\\n_i"), std::string::npos) << csv;
  EXPECT_NE(csv.find("0.5"), std::string::npos);
}
