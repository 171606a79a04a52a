#include <gtest/gtest.h>

#include <cmath>

#include "oldroyd/model.hpp"
#include "oldroyd/random.hpp"
#include "support.hpp"

using namespace oldroyd;
using oldroyd::testing::max_coeff;
using oldroyd::testing::max_coeff_diff;

namespace {

// Band 3 at n = 16 keeps every pointwise product below the Nyquist plane, so
// products evaluated directly on the base grid are exact.
constexpr int kN = 16;
constexpr double kBand = 3.0;

struct Sampled {
  PhysicalField<3> u;
  PhysicalField<9> gu;
  PhysicalField<6> tau;
  PhysicalField<18> gtau;
};

Sampled sample(const VectorField& u, const SymTensorField& tau) {
  return {transform_inverse(u), transform_inverse(velocity_gradient(u)), transform_inverse(tau),
          transform_inverse(gradient(tau))};
}

}  // namespace

TEST(Kinematics, ShearExample) {
  auto g = Grid::make(8);
  const VectorField u = sample_field<3>(g, [](double, double y, double) {
    return std::array<double, 3>{std::sin(y), 0.0, 0.0};
  });
  const SymTensorField d_expected = sample_field<6>(g, [](double, double y, double) {
    return std::array<double, 6>{0, 0, 0, 0.5 * std::cos(y), 0, 0};
  });
  EXPECT_LT(max_coeff_diff(sym_grad(u), d_expected), 1e-15);
  const TensorField w = skew_grad(u);
  const TensorField w_expected = sample_field<9>(g, [](double, double y, double) {
    std::array<double, 9> m{};
    m[1] = 0.5 * std::cos(y);
    m[3] = -0.5 * std::cos(y);
    return m;
  });
  EXPECT_LT(max_coeff_diff(w, w_expected), 1e-15);
}

TEST(Kinematics, SymmetricGradientHasNoSpin) {
  auto g = Grid::make(8);
  const VectorField u = sample_field<3>(g, [](double x, double, double) {
    return std::array<double, 3>{std::sin(x), 0.0, 0.0};
  });
  EXPECT_LT(max_coeff(skew_grad(u)), 1e-16);
}

TEST(Kinematics, StrainPlusSpinIsGradient) {
  FieldSampler s(Grid::make(kN), 1);
  const VectorField u = s.band<3>(6);
  EXPECT_LT(max_coeff_diff(to_full(sym_grad(u)) + skew_grad(u), velocity_gradient(u)), 1e-16);
}

TEST(BilinearQ, VanishesOnZeroInputs) {
  auto g = Grid::make(8);
  FieldSampler s(g, 2);
  const SymTensorField tau = s.symmetric(3);
  const VectorField u = s.solenoidal(3);
  EXPECT_EQ(max_coeff(bilinear_Q(SymTensorField(g), velocity_gradient(u), 0.4)), 0.0);
  EXPECT_EQ(max_coeff(bilinear_Q(tau, TensorField(g), 0.4)), 0.0);
}

TEST(BilinearQ, ConstantStressInShear) {
  auto g = Grid::make(8);
  const SymTensorField tau = sample_field<6>(g, [](double, double, double) {
    return std::array<double, 6>{1.0, -1.0, 0, 0, 0, 0};
  });
  const VectorField u = sample_field<3>(g, [](double, double y, double) {
    return std::array<double, 3>{std::sin(y), 0.0, 0.0};
  });
  const SymTensorField expected = sample_field<6>(g, [](double, double y, double) {
    return std::array<double, 6>{0, 0, 0, std::cos(y), 0, 0};
  });
  EXPECT_LT(max_coeff_diff(bilinear_Q(tau, velocity_gradient(u), 0.0), expected), 1e-15);
}

TEST(BilinearQ, CorotationalTraceFree) {
  FieldSampler s(Grid::make(kN), 3);
  const SymTensorField tau = s.symmetric(6);
  const VectorField u = s.band<3>(6);
  const SymTensorField q = bilinear_Q(tau, velocity_gradient(u), 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    worst = std::max(worst, std::abs(q[0][i] + q[1][i] + q[2][i]));
  }
  EXPECT_LT(worst, 1e-16);
}

TEST(BilinearQ, MatchesPointwiseMatrixArithmetic) {
  auto g = Grid::make(kN);
  FieldSampler s(g, 4);
  const SymTensorField tau = s.symmetric(kBand);
  const VectorField u = s.band<3>(kBand);
  const double b = 0.7;
  const Sampled p = sample(u, tau);
  PhysicalField<6> q(g);
  for (std::size_t m = 0; m < g->physical_size(); ++m) {
    double t[3][3], d[3][3], w[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        t[i][j] = p.tau.comp[sym_index(i, j)][m];
        d[i][j] = 0.5 * (p.gu.comp[3 * i + j][m] + p.gu.comp[3 * j + i][m]);
        w[i][j] = 0.5 * (p.gu.comp[3 * i + j][m] - p.gu.comp[3 * j + i][m]);
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        double v = 0.0;
        for (int l = 0; l < 3; ++l) {
          v += t[i][l] * w[l][j] - w[i][l] * t[l][j] + b * (d[i][l] * t[l][j] + t[i][l] * d[l][j]);
        }
        q.comp[sym_index(i, j)][m] = v;
      }
    }
  }
  const SymTensorField expected = transform_forward(q);
  EXPECT_LT(max_coeff_diff(bilinear_Q(tau, velocity_gradient(u), b), expected),
            1e-14 * max_coeff(expected));
}

TEST(ProjectedStressDiv, IsotropicStressIsPressure) {
  FieldSampler s(Grid::make(kN), 5);
  const ScalarField phi = s.scalar(6);
  SymTensorField tau(phi.grid_ptr());
  for (std::size_t c = 0; c < 3; ++c) tau[c] = phi[0];
  EXPECT_LT(max_coeff(projected_stress_div(tau)), 1e-16);
  EXPECT_GT(max_coeff(tensor_divergence(tau)), 1e-3);
}

TEST(ProjectedStressDiv, DivergenceFreeStress) {
  auto g = Grid::make(kN);
  // components coupling only directions 1, 2 and depending only on x3
  const SymTensorField tau = sample_field<6>(g, [](double, double, double z) {
    return std::array<double, 6>{std::sin(z), std::cos(2 * z), 0, std::sin(3 * z), 0, 0};
  });
  EXPECT_LT(max_coeff(projected_stress_div(tau)), 1e-16);
}

TEST(OldroydRhs, ZeroState) {
  auto g = Grid::make(8);
  const OldroydRhs r = oldroyd_rhs(OldroydState(g), ModelParams{});
  EXPECT_EQ(max_coeff(r.du_dt), 0.0);
  EXPECT_EQ(max_coeff(r.dtau_dt), 0.0);
}

TEST(OldroydRhs, DivergenceFreeStressIsSteady) {
  auto g = Grid::make(kN);
  const SymTensorField tau = sample_field<6>(g, [](double, double, double z) {
    return std::array<double, 6>{std::sin(z), std::cos(2 * z), 0, std::sin(3 * z), 0, 0};
  });
  ModelParams p;
  p.b = 0.5;
  const OldroydRhs r = oldroyd_rhs(OldroydState(VectorField(g), tau), p);
  EXPECT_LT(max_coeff(r.du_dt), 1e-16);
  EXPECT_LT(max_coeff(r.dtau_dt), 1e-16);
}

// Unprojected pointwise evaluation of the momentum equation plus an explicit
// pressure solve lap p = d_i d_j (mu1 tau_ij - u_i u_j).
TEST(OldroydRhs, MatchesPressureSolveOracle) {
  auto g = Grid::make(kN);
  FieldSampler s(g, 6);
  const VectorField u = 0.3 * s.solenoidal(kBand);
  SymTensorField tau = 0.2 * s.symmetric(kBand);
  tau[0][0] = 0.1;  // nonzero stress mean is legal
  ModelParams params{0.8, 1.3, 0.6, 0.25, -0.4};
  const OldroydRhs r = oldroyd_rhs(OldroydState(u, tau), params);

  const Sampled p = sample(u, tau);
  PhysicalField<3> adv(g);
  PhysicalField<6> uu(g);
  PhysicalField<6> tau_rhs(g);
  for (std::size_t m = 0; m < g->physical_size(); ++m) {
    for (std::size_t i = 0; i < 3; ++i) {
      double a = 0.0;
      for (std::size_t j = 0; j < 3; ++j) a += p.u.comp[j][m] * p.gu.comp[3 * i + j][m];
      adv.comp[i][m] = a;
      for (std::size_t j = i; j < 3; ++j) uu.comp[sym_index(i, j)][m] = p.u.comp[i][m] * p.u.comp[j][m];
    }
  }
  const VectorField adv_hat = transform_forward(adv);
  const SymTensorField uu_hat = transform_forward(uu);
  SymTensorField source = params.mu1 * tau;
  source -= uu_hat;
  const ScalarField pressure = inv_laplacian(remove_mean(double_divergence(source)));
  VectorField expected = params.mu * laplacian(u);
  expected.add_scaled(params.mu1, tensor_divergence(tau));
  expected -= adv_hat;
  expected -= gradient(pressure);
  EXPECT_LT(max_coeff_diff(r.du_dt, expected), 1e-12 * max_coeff(expected));

  // stress equation, pointwise
  for (std::size_t m = 0; m < g->physical_size(); ++m) {
    double t[3][3], gu[3][3];
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        t[i][j] = p.tau.comp[sym_index(i, j)][m];
        gu[i][j] = p.gu.comp[3 * i + j][m];
      }
    }
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i; j < 3; ++j) {
        const std::size_t c = sym_index(i, j);
        double v = 0.0;
        for (std::size_t l = 0; l < 3; ++l) v -= p.u.comp[l][m] * p.gtau.comp[3 * c + l][m];
        v -= params.a * t[i][j];
        for (std::size_t l = 0; l < 3; ++l) {
          const double w_il = 0.5 * (gu[i][l] - gu[l][i]), w_lj = 0.5 * (gu[l][j] - gu[j][l]);
          const double d_il = 0.5 * (gu[i][l] + gu[l][i]), d_lj = 0.5 * (gu[l][j] + gu[j][l]);
          v -= t[i][l] * w_lj - w_il * t[l][j] + params.b * (d_il * t[l][j] + t[i][l] * d_lj);
        }
        v += params.mu2 * 0.5 * (gu[i][j] + gu[j][i]);
        tau_rhs.comp[c][m] = v;
      }
    }
  }
  const SymTensorField tau_expected = transform_forward(tau_rhs);
  EXPECT_LT(max_coeff_diff(r.dtau_dt, tau_expected), 1e-12 * max_coeff(tau_expected));
}

TEST(OldroydRhs, VelocityTendencyIsSolenoidalAndMeanFree) {
  FieldSampler s(Grid::make(kN), 7);
  const VectorField u = s.solenoidal(5);
  const SymTensorField tau = s.symmetric(5);
  const OldroydRhs r = oldroyd_rhs(OldroydState(u, tau), ModelParams{});
  EXPECT_LT(max_coeff(divergence(r.du_dt)), 1e-13 * max_coeff(r.du_dt));
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(r.du_dt.mean(c), Complex{});
}

TEST(OldroydRhs, ProjectedMeanOption) {
  FieldSampler s(Grid::make(kN), 8);
  OldroydState st(s.solenoidal(5), s.symmetric(5));
  OldroydSystem sys{ModelParams{}};
  sys.params.b = 1.0;
  const auto free_mean = sys.explicit_rhs(st);
  sys.project_tau_mean = true;
  const auto frozen = sys.explicit_rhs(st);
  double drift = 0.0;
  for (std::size_t c = 0; c < 6; ++c) {
    drift = std::max(drift, std::abs(free_mean.tau.mean(c)));
    EXPECT_EQ(frozen.tau.mean(c), Complex{});
  }
  // the mean of Q feeds the stress mean when b != 0
  EXPECT_GT(drift, 1e-6);
}

TEST(Invariants, ProjectionFact) {
  FieldSampler s(Grid::make(kN), 9);
  const VectorField u = s.solenoidal(7);
  const VectorField lhs = leray_project(tensor_divergence(sym_grad(u)));
  EXPECT_LT(max_coeff_diff(lhs, 0.5 * laplacian(u)), 1e-13 * max_coeff(laplacian(u)));
}

TEST(Invariants, LinearCouplingIsEnergyNeutral) {
  FieldSampler s(Grid::make(kN), 10);
  const OldroydState st(s.solenoidal(6), s.symmetric(6));
  OldroydSystem sys{ModelParams{0.0, 1.7, 0.4, 0.0, 0.0}};
  sys.nonlinear = false;
  const OldroydRhs r = sys.rhs(st);
  const double a = inner(r.du_dt, st.u) / sys.params.mu1;
  const double b = inner(r.dtau_dt, st.tau) / sys.params.mu2;
  EXPECT_NEAR(a + b, 0.0, 1e-13 * std::abs(a));
  EXPECT_GT(std::abs(a), 1e-3);
}

TEST(ModelParams, Validation) {
  ModelParams p;
  EXPECT_NO_THROW(p.validate());
  p.b = 1.5;
  EXPECT_THROW(p.validate(), OutOfRange);
  p = {};
  p.mu = -1.0;
  EXPECT_THROW(p.validate(), OutOfRange);
}
