#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oldroyd/harness/run.hpp"
#include "support.hpp"

using namespace oldroyd;
using namespace oldroyd::harness;
using oldroyd::testing::max_coeff;
using oldroyd::testing::max_coeff_diff;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oldroyd-harness-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

RunConfig small_run(const fs::path& dir) {
  RunConfig c;
  c.n = 16;
  c.kmax = 3;
  c.time.dt = 0.05;
  c.time.t_end = 2.0;
  c.time.diag_interval = 2;
  c.output_dir = dir.string();
  return c;
}

}  // namespace

TEST(ConfigText, EmptyTextGivesDefaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.n, 32);
  EXPECT_EQ(c.params.mu, 1.0);
  EXPECT_EQ(c.params.mu1, 1.0);
  EXPECT_EQ(c.params.mu2, 1.0);
  EXPECT_EQ(c.params.a, 0.0);
  EXPECT_EQ(c.params.b, 0.0);
  EXPECT_EQ(c.time.dt, 0.005);
  EXPECT_EQ(c.time.t_end, 50.0);
  EXPECT_EQ(c.preset, Preset::RandomBand);
  EXPECT_EQ(c.amplitude, 0.01);
  EXPECT_EQ(c.kmax, 4.0);
  EXPECT_EQ(c.model, ModelKind::Oldroyd);
  EXPECT_FALSE(c.project_tau_mean);
  EXPECT_EQ(c.fit_lo(), 25.0);
  EXPECT_EQ(c.fit_hi(), 50.0);
}

TEST(ConfigText, DampedRun) {
  const RunConfig c = parse_config("# damped\nparams.a = 0.5   # relaxation\n\n");
  EXPECT_EQ(c.params.a, 0.5);
}

TEST(ConfigText, OddGridIsOutOfRange) {
  try {
    parse_config("grid.n = 7");
    FAIL();
  } catch (const OutOfRange& e) {
    EXPECT_EQ(e.key(), "grid.n");
  }
}

TEST(ConfigText, UnknownKeyReportsLine) {
  try {
    parse_config("grid.n = 16\n\nparams.lambda = 2\n");
    FAIL();
  } catch (const UnknownKey& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.key(), "params.lambda");
  }
}

TEST(ConfigText, MalformedLines) {
  try {
    parse_config("grid.n 16");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
  }
  EXPECT_THROW(parse_config("x\n = 3"), ParseError);
  EXPECT_THROW(parse_config("time.dt ="), ParseError);
  EXPECT_THROW(parse_config("time.dt = fast"), OutOfRange);
  EXPECT_THROW(parse_config("grid.n = 16.5"), OutOfRange);
}

TEST(ConfigText, Validation) {
  EXPECT_THROW(parse_config("init.preset = vortex-ring"), BadPreset);
  EXPECT_THROW(parse_config("grid.n = 12\ninit.kmax = 5"), OutOfRange);
  EXPECT_THROW(parse_config("params.b = 1.5"), OutOfRange);
  EXPECT_THROW(parse_config("time.dt = -1"), OutOfRange);
  EXPECT_THROW(parse_config("model = maxwell"), OutOfRange);
  EXPECT_THROW(parse_config("init.preset = hookean-generic"), OutOfRange);
  EXPECT_NO_THROW(parse_config("model = hookean\ninit.preset = hookean-generic"));
  EXPECT_THROW(parse_config("report.fit_start = 10\nreport.fit_end = 5"), OutOfRange);
  EXPECT_THROW(parse_config("output.snapshots = true\noutput.snapshot_interval = 15"), OutOfRange);
}

TEST(ConfigText, FormatRoundTrip) {
  RunConfig c = parse_config(
      "grid.n = 16\nparams.b = -0.25\ntime.dt = 0.01\nmodel = linearized\nmodel.tau_mean = project\n"
      "init.seed = 9\noutput.snapshots = yes\noutput.snapshot_interval = 20\nreport.identity_trials = 3");
  const RunConfig d = parse_config(format_config(c));
  EXPECT_EQ(format_config(d), format_config(c));
  EXPECT_EQ(d.model, ModelKind::Linearized);
  EXPECT_TRUE(d.project_tau_mean);
  EXPECT_EQ(d.seed, 9u);
}

TEST(Initial, ZeroAmplitude) {
  auto g = Grid::make(16);
  for (Preset p : {Preset::TaylorGreen, Preset::RandomBand}) {
    const OldroydState s = make_oldroyd_initial(p, 0.0, 4, 1, g);
    EXPECT_EQ(max_coeff(s.u), 0.0);
    EXPECT_EQ(max_coeff(s.tau), 0.0);
  }
  const HookeanState h = make_hookean_initial(Preset::HookeanGeneric, 0.0, 4, 1, g);
  EXPECT_EQ(max_coeff(h.F_minus_I), 0.0);
}

TEST(Initial, TaylorGreenIsSolenoidal) {
  auto g = Grid::make(16);
  const OldroydState s = make_oldroyd_initial(Preset::TaylorGreen, 1.0, 4, 0, g);
  EXPECT_LE(max_coeff(divergence(s.u)), 1e-13);
  EXPECT_GT(max_coeff(s.u), 0.1);
}

TEST(Initial, RandomBandHitsDataNorm) {
  auto g = Grid::make(16);
  const OldroydState s = make_oldroyd_initial(Preset::RandomBand, 0.01, 4, 5, g);
  EXPECT_NEAR(data_norm(s), 0.01, 1e-15);
  EXPECT_LE(l2_norm(divergence(s.u)), 1e-15);
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    if (g->k2(i) > 16.0 || g->k2(i) == 0.0) {
      for (std::size_t c = 0; c < 6; ++c) ASSERT_EQ(s.tau[c][i], Complex{});
    }
  }
}

TEST(Initial, RandomBandReplaysBytewise) {
  auto g = Grid::make(16);
  const OldroydState a = make_oldroyd_initial(Preset::RandomBand, 0.01, 4, 5, g);
  const OldroydState b = make_oldroyd_initial(Preset::RandomBand, 0.01, 4, 5, g);
  for (std::size_t c = 0; c < 6; ++c) {
    EXPECT_EQ(std::memcmp(a.tau[c].data(), b.tau[c].data(), a.tau[c].size() * sizeof(Complex)), 0);
  }
  const OldroydState other = make_oldroyd_initial(Preset::RandomBand, 0.01, 4, 6, g);
  EXPECT_GT(max_coeff_diff(a.u, other.u), 0.0);
}

TEST(Initial, HookeanGenericHasNoDivCurlStructure) {
  auto g = Grid::make(16);
  const HookeanState h = make_hookean_initial(Preset::HookeanGeneric, 0.01, 4, 7, g);
  EXPECT_NEAR(data_norm(h), 0.01, 1e-15);
  const double size = l2_norm(h.F_minus_I);
  EXPECT_GT(l2_norm(tensor_divergence(h.F_minus_I)), 0.1 * size);
  EXPECT_GT(l2_norm(row_curl(h.F_minus_I)), 0.1 * size);
}

TEST(Initial, PresetModelMismatch) {
  auto g = Grid::make(16);
  EXPECT_THROW(make_oldroyd_initial(Preset::HookeanGeneric, 0.01, 4, 1, g), BadPreset);
  EXPECT_THROW(make_hookean_initial(Preset::RandomBand, 0.01, 4, 1, g), BadPreset);
  EXPECT_THROW(make_oldroyd_initial(Preset::RandomBand, 0.01, 6, 1, g), OutOfRange);
}

TEST(Snapshot, RoundTrip) {
  const fs::path dir = scratch("snapshot");
  fs::create_directories(dir);
  auto g = Grid::make(16);
  const OldroydState s = make_oldroyd_initial(Preset::RandomBand, 1.0, 5, 3, g);
  {
    SnapshotWriter w(dir / "s.bin");
    w.write("u", s.u, 0.125);
    w.write("tau", s.tau, 0.125);
  }
  const auto recs = read_snapshot(dir / "s.bin");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].name, "u");
  EXPECT_EQ(recs[1].components, 6u);
  EXPECT_EQ(recs[1].time, 0.125);
  EXPECT_LE(max_coeff_diff(to_field<3>(recs[0], g), s.u), 1e-12 * max_coeff(s.u));
  EXPECT_LE(max_coeff_diff(to_field<6>(recs[1], g), s.tau), 1e-12 * max_coeff(s.tau));
  EXPECT_THROW(to_field<3>(recs[1], g), SizeMismatch);

  // samples are little-endian doubles, x1 fastest
  const PhysicalField<3> p = transform_inverse(s.u);
  const std::string raw = slurp(dir / "s.bin");
  const auto data = raw.find("data\n") + 5;
  double first = 0.0, second = 0.0;
  std::memcpy(&first, raw.data() + data, 8);
  std::memcpy(&second, raw.data() + data + 8, 8);
  EXPECT_EQ(first, p.comp[0][0]);
  EXPECT_EQ(second, p.comp[0][1]);
  EXPECT_EQ(p.comp[0][1], p.at(0, 1, 0, 0));

  std::ofstream(dir / "cut.bin", std::ios::binary) << raw.substr(0, raw.size() - 8);
  EXPECT_THROW(read_snapshot(dir / "cut.bin"), Error);
}

TEST(Run, ZeroDataGivesZeroNorms) {
  const fs::path dir = scratch("zero");
  RunConfig c = small_run(dir);
  c.amplitude = 0.0;
  c.time.t_end = 0.5;
  const RunOutcome o = execute(c);
  ASSERT_EQ(o.exit_code, kExitOk);
  const auto rows = read_csv(dir / "energies.csv");
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    ASSERT_EQ(r.size(), 1 + kNormCount + 6);
    for (std::size_t k = 1; k <= kNormCount + 4; ++k) EXPECT_EQ(r[k], 0.0);
  }
}

TEST(Run, SmallDataRun) {
  const fs::path dir = scratch("small");
  RunConfig c = small_run(dir);
  c.snapshots = true;
  c.snapshot_interval = 20;
  c.identity_trials = 1;
  const RunOutcome o = execute(c);
  ASSERT_EQ(o.exit_code, kExitOk) << o.message;

  std::ifstream f(dir / "energies.csv");
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header,
            "t,inv_u_h3,inv_tau_h3,u_h3,u_h2,grad_u_h2,grad_u_h1,grad2_u_h1,inv_pdivtau_h2,"
            "pdivtau_h1,grad_pdivtau_l2,e0,e1,e2,tau_mean_frobenius,dt,cfl");
  const auto rows = read_csv(dir / "energies.csv");
  ASSERT_EQ(rows.size(), 21u);
  EXPECT_EQ(rows.back()[0], 2.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t k = 11; k <= 13; ++k) EXPECT_GE(rows[i][k], rows[i - 1][k]);
    EXPECT_EQ(rows[i][15], 0.05);
  }
  EXPECT_TRUE(fs::exists(dir / "snap_00000000.bin"));
  EXPECT_TRUE(fs::exists(dir / "snap_00000040.bin"));
  EXPECT_EQ(read_snapshot(dir / "snap_00000020.bin")[1].name, "tau");

  const std::string report = slurp(dir / "report.txt");
  EXPECT_NE(report.find("u_h3 exponent="), std::string::npos);
  EXPECT_NE(report.find("max E0/(E0(0)+E0^1.5+E2^1.5)"), std::string::npos);
  EXPECT_NE(report.find("g_closure identity"), std::string::npos);
  EXPECT_EQ(parse_config(slurp(dir / "config.txt")).n, 16);
}

TEST(Run, CflExit) {
  const fs::path dir = scratch("cfl");
  RunConfig c = small_run(dir);
  c.preset = Preset::TaylorGreen;
  c.amplitude = 1.0;
  c.time.dt = 10.0;
  c.time.t_end = 20.0;
  EXPECT_EQ(run(c), kExitCfl);
  EXPECT_TRUE(fs::exists(dir / "report.txt"));
}

TEST(Run, ConfigErrorLeavesNoOutput) {
  const fs::path dir = scratch("bad");
  RunConfig c = small_run(dir);
  c.kmax = 9;
  EXPECT_EQ(run(c), kExitConfig);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Run, LinearizedAndHookeanModels) {
  const fs::path dir = scratch("models");
  RunConfig c = small_run(dir / "lin");
  c.model = ModelKind::Linearized;
  c.time.t_end = 0.5;
  EXPECT_EQ(run(c), kExitOk);
  c.output_dir = (dir / "hook").string();
  c.model = ModelKind::Hookean;
  c.preset = Preset::HookeanGeneric;
  EXPECT_EQ(run(c), kExitOk);
  EXPECT_EQ(read_csv(dir / "hook" / "energies.csv").size(), 6u);
}

TEST(Run, OutputRootFromEnvironment) {
  const fs::path root = scratch("root");
  ::setenv(kOutputRootEnv, root.c_str(), 1);
  RunConfig c;
  c.output_dir = "rel";
  EXPECT_EQ(c.output_path(), root / "rel");
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(c.output_path(), fs::path("out") / "rel");
}

TEST(Sweep, SummaryHasOneRowPerVariant) {
  const fs::path dir = scratch("sweep");
  RunConfig c = small_run(dir);
  c.time.t_end = 1.0;
  const auto out = sweep(c, "params.a", {"0", "0.5"});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "params.a=0.5" / "energies.csv"));
  std::ifstream f(dir / "sweep-summary.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(f, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1].rfind("params.a=0,0,", 0), 0u);
  EXPECT_THROW(sweep(c, "params.zeta", {"1"}), UnknownKey);
}

TEST(Consistency, ShortCoEvolution) {
  const fs::path dir = scratch("consistency");
  RunConfig c = small_run(dir);
  c.model = ModelKind::Hookean;
  c.preset = Preset::HookeanGeneric;
  c.time.t_end = 0.5;
  const ConsistencyOutcome o = hookean_consistency(c);
  ASSERT_EQ(o.exit_code, kExitOk) << o.message;
  EXPECT_LE(o.max_drift, 1e-10);
  EXPECT_LE(o.max_closure, 1e-11);
  EXPECT_EQ(read_csv(dir / "consistency.csv").size(), 6u);
}

TEST(Linear, EigenvalueCsv) {
  std::ostringstream s;
  write_eigenvalue_csv(s, eigenvalue_table(2, ModelParams{}));
  const std::string out = s.str();
  EXPECT_NE(out.find("\n1,-0.5,0.5,-0.5,-0.5,0\n"), std::string::npos);
  EXPECT_NE(out.find("\n2,-1,0,-1,0,1\n"), std::string::npos);
}
