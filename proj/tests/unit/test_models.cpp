#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cfcal/error.hpp"
#include "cfcal/models.hpp"

using namespace cfcal;
using namespace cfcal::models;

namespace {

const IdmParams kIdmRef{2.76, 1, 20.0, 9.89, 2.79, 24.58};
const BlendParams kBlendRef{};

IdmParams random_idm(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> a(0.33, 17.4), v0(1, 137), s0(0.5, 33), T(0.1, 5), b(0.33, 26);
  std::uniform_int_distribution<int> d(1, 10);
  return {a(gen), d(gen), v0(gen), s0(gen), T(gen), b(gen)};
}

CfState state(double s, double v, double v_l, double a_l) {
  CfState st;
  st.s = s;
  st.v = v;
  st.v_l = v_l;
  st.a_l = a_l;
  st.x_l = s;
  return st;
}

}  // namespace

TEST(Idm, FreeFlowAtDesiredSpeed) { EXPECT_NEAR(idm_accel(kIdmRef, 1e9, kIdmRef.v0, 0.0), 0.0, 1e-9); }

TEST(Idm, StandstillEquilibrium) { EXPECT_EQ(idm_accel(kIdmRef, kIdmRef.s0, 0.0, 0.0), 0.0); }

TEST(Idm, ReferenceParamsHandCase) { EXPECT_NEAR(idm_accel(kIdmRef, 60.0, 14.0, 0.0), -1.0090119166666669, 1e-12); }

TEST(Idm, NonPositiveGapRejected) {
  try {
    idm_accel(kIdmRef, 0.0, 5.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Idm, IncreasingInGapAndBoundedByA) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> v(0.1, 30), dv(-10, 10), s(0.5, 300);
  for (int k = 0; k < 2000; ++k) {
    const auto p = random_idm(gen);
    const double vv = v(gen), d = dv(gen), s1 = s(gen), s2 = s1 + 1.0 + s(gen);
    EXPECT_LT(idm_accel(p, s1, vv, d), idm_accel(p, s2, vv, d));
    EXPECT_LE(idm_accel(p, s1, vv, d), p.a);
  }
}

TEST(Idm, EquilibriumExamples) {
  EXPECT_EQ(equilibrium_spacing(kIdmRef, 0.0), kIdmRef.s0);
  EXPECT_NEAR(equilibrium_spacing(kIdmRef, 14.0), 89.370063966259593, 1e-9);
  EXPECT_ANY_THROW(equilibrium_spacing(kIdmRef, 20.0));
}

TEST(Idm, EquilibriumIdentity) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> frac(0.0, 0.95);
  for (int k = 0; k < 2000; ++k) {
    const auto p = random_idm(gen);
    const double v = frac(gen) * p.v0;
    EXPECT_NEAR(idm_accel(p, equilibrium_spacing(p, v), v, 0.0), 0.0, 1e-9);
  }
}

TEST(Cah, SteadyFollowingIsZero) { EXPECT_EQ(cah_accel(kIdmRef, 40.0, 12.0, 12.0, 0.0), 0.0); }

TEST(Cah, StoppedLeaderBraking) { EXPECT_DOUBLE_EQ(cah_accel(kIdmRef, 50.0, 10.0, 0.0, -5.0), -1.0); }

TEST(Cah, StoppedLeaderNotBrakingUsesSecondBranch) {
  EXPECT_DOUBLE_EQ(cah_accel(kIdmRef, 50.0, 10.0, 0.0, 0.0), -1.0);
}

TEST(Cah, SecondBranchBoundedByCappedLeaderAccel) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> s(1, 200), v(0, 25), al(-10, 10);
  for (int k = 0; k < 2000; ++k) {
    const double ss = s(gen), vf = v(gen), vl = v(gen), a_l = al(gen);
    const double at = std::min(a_l, kIdmRef.a);
    if (vl * (vf - vl) <= -2 * ss * at && vl * vl - 2 * ss * at > 0) continue;
    EXPECT_LE(cah_accel(kIdmRef, ss, vf, vl, a_l), at);
  }
}

TEST(Cah, BranchesAgreeOnBoundary) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> vl(0.5, 20), al(-8, -0.05), u(0.01, 1);
  for (int k = 0; k < 100; ++k) {
    const double v_l = vl(gen), at = al(gen);
    const double v = v_l + u(gen) * (40.0 - v_l);
    const double ss = v_l * (v - v_l) / (-2.0 * at);
    const double first = v * v * at / (v_l * v_l - 2.0 * ss * at);
    const double second = at - (v - v_l) * (v - v_l) / (2.0 * ss);
    EXPECT_NEAR(first, second, 1e-9);
    EXPECT_NEAR(cah_accel(kIdmRef, ss, v, v_l, at), first, 1e-9);
    EXPECT_NEAR(cah_accel(kIdmRef, ss, v * (1 + 1e-13), v_l, at), first, 1e-9);
    EXPECT_NEAR(cah_accel(kIdmRef, ss, v * (1 - 1e-13), v_l, at), first, 1e-9);
  }
}

TEST(Blend, ZeroCoolnessIsIdm) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> s(1, 200), v(0, 25), al(-10, 5);
  BlendParams p = kBlendRef;
  p.c = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const auto st = state(s(gen), v(gen), v(gen), al(gen));
    EXPECT_EQ(blend_accel(p, st), idm_accel(p.idm, st.s, st.v, st.dv()));
  }
}

TEST(Blend, IdmAtLeastCahReturnsIdm) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> s(1, 200), v(0, 25), al(-10, 5);
  int seen = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto st = state(s(gen), v(gen), v(gen), al(gen));
    const double a_i = idm_accel(kBlendRef.idm, st.s, st.v, st.dv());
    if (a_i < cah_accel(kBlendRef.idm, st.s, st.v, st.v_l, st.a_l)) continue;
    ++seen;
    EXPECT_EQ(blend_accel(kBlendRef, st), a_i);
  }
  EXPECT_GT(seen, 100);
}

TEST(Blend, ReferenceParamsHandCase) {
  EXPECT_NEAR(blend_accel(kBlendRef, state(30.0, 15.0, 5.0, -3.0)), -5.6840870965634371, 1e-12);
}

TEST(Blend, ContinuousAcrossBranchSwitch) {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> v(1, 20), al(-6, 1);
  int checked = 0;
  for (int k = 0; k < 500 && checked < 100; ++k) {
    const double vf = v(gen), vl = v(gen), a_l = al(gen);
    auto gap = [&](double s) {
      return idm_accel(kBlendRef.idm, s, vf, vf - vl) - cah_accel(kBlendRef.idm, s, vf, vl, a_l);
    };
    double lo = 0.5, hi = 400.0;
    if ((gap(lo) < 0) == (gap(hi) < 0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((gap(mid) < 0) == (gap(lo) < 0) ? lo : hi) = mid;
    }
    const double left = blend_accel(kBlendRef, state(lo, vf, vl, a_l));
    const double right = blend_accel(kBlendRef, state(hi, vf, vl, a_l));
    EXPECT_NEAR(left, right, 1e-9);
    ++checked;
  }
  EXPECT_GE(checked, 50);
}

TEST(Blend, ImprovedVariantMatchesIdmAtEquilibriumGap) {
  BlendParams p = kBlendRef;
  p.improved = true;
  const auto st = state(200.0, 5.0, 5.0, 0.0);
  EXPECT_LE(blend_accel(p, st), p.idm.a);
  EXPECT_EQ(improved_idm_accel(p.idm, p.idm.s0, 0.0, 0.0), 0.0);
}

TEST(LinearAcc, EquilibriumIsZero) {
  const AccParams p;
  CfState st;
  st.v = st.v_l = 10.0;
  st.x_f = 0.0;
  st.x_l = p.d0 + p.t_des * st.v;
  EXPECT_NEAR(linear_acc_accel(p, st), 0.0, 1e-12);
}

TEST(LinearAcc, ReferenceGainsHandCase) {
  CfState st;
  st.x_l = 300;
  st.x_f = 200;
  st.v = 10;
  st.v_l = 12;
  EXPECT_NEAR(linear_acc_accel(AccParams{}, st), 1.214, 1e-12);
  EXPECT_NEAR(0.01 * 35.4 + 0.43 * 2.0, 1.214, 1e-12);
}

TEST(LinearAcc, DoublingK1DoublesGapTerm) {
  CfState st;
  st.x_l = 173.5;
  st.x_f = 20.25;
  st.v = 9.0;
  st.v_l = 9.0;
  AccParams p;
  const double base = linear_acc_accel(p, st);
  p.k1 *= 2;
  EXPECT_DOUBLE_EQ(linear_acc_accel(p, st), 2 * base);
}

TEST(Params, ValidationAndKinds) {
  IdmParams bad = kIdmRef;
  bad.delta = 0;
  EXPECT_ANY_THROW(bad.validate());
  EXPECT_EQ(parse_kind("iidm"), ModelKind::Blend);
  EXPECT_EQ(parse_kind("linear_acc"), ModelKind::LinearAcc);
  EXPECT_EQ(kind_name(ModelKind::Blend), "blend");
  EXPECT_ANY_THROW(parse_kind("wiedemann"));
}

TEST(Genes, DefaultBoundsAndRoundTrip) {
  const auto g = default_genes(ModelKind::Blend);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_EQ(g[1].name, "delta");
  EXPECT_TRUE(g[1].integer);
  EXPECT_EQ(g[2].hi, 137.0);
  EXPECT_EQ(g[6].name, "c");
  EXPECT_EQ(default_genes(ModelKind::LinearAcc)[0].hi, 9.0);

  const std::vector<double> genes{2.0, 2.6, 20.0, 9.0, 2.0, 20.0};
  const auto p = std::get<IdmParams>(decode_genes(ModelKind::Idm, genes));
  EXPECT_EQ(p.delta, 3);
  const auto back = encode_genes(p);
  EXPECT_EQ(back[1], 3.0);
  EXPECT_EQ(back[0], 2.0);

  AccParams base;
  base.d0 = 12.0;
  const auto acc = std::get<AccParams>(decode_genes(ModelKind::LinearAcc, std::vector<double>{4.96, 0.01, 0.43}, base));
  EXPECT_EQ(acc.d0, 12.0);
}
