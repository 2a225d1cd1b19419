#include "qdec/ansatz.hpp"

#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "qdec/rng.hpp"
#include "qdec/trainer.hpp"

using namespace qdec;

TEST(EffectiveAngles, ZeroSyndromeGivesZeroAngles) {
  AnsatzConfig cfg = make_ansatz_config(3, 2, 4, 1);
  ParameterSet params = init_params(cfg, 0.5, 7);
  EffectiveAngles ang = effective_angles(params, BitVec(4));
  for (double a : ang.alpha) EXPECT_EQ(a, 0.0);
  for (double b : ang.beta_y) EXPECT_EQ(b, 0.0);
}

TEST(EffectiveAngles, DotProductOfCoefficients) {
  AnsatzConfig cfg = make_ansatz_config(1, 1, 2, 1);
  ParameterSet params = ParameterSet::zeros(cfg);
  params.theta = {0.3, 0.5};
  params.phi = {0.0, 0.0};
  BitVec syndrome(2);
  syndrome.set(0, true);
  syndrome.set(1, true);
  EffectiveAngles ang = effective_angles(params, syndrome);
  EXPECT_DOUBLE_EQ(ang.alpha[0], 0.8);
  syndrome.set(1, false);
  EXPECT_DOUBLE_EQ(effective_angles(params, syndrome).alpha[0], 0.3);
}

TEST(EffectiveAngles, ParameterCountIsTwoQBm) {
  AnsatzConfig cfg = make_ansatz_config(3, 2, 3, 1);
  ParameterSet params = ParameterSet::zeros(cfg);
  EXPECT_EQ(params.count(), 36u);  // 2*3*2*3
}

TEST(EffectiveAngles, RejectsLengthMismatch) {
  AnsatzConfig cfg = make_ansatz_config(2, 1, 3, 1);
  ParameterSet params = ParameterSet::zeros(cfg);
  EXPECT_THROW(effective_angles(params, BitVec(2)), std::invalid_argument);
}

TEST(EffectiveAngles, LinearOnDisjointSyndromes) {
  AnsatzConfig cfg = make_ansatz_config(2, 3, 6, 1);
  ParameterSet params = init_params(cfg, 1.0, 3);
  std::mt19937_64 eng(55);
  for (int rep = 0; rep < 20; ++rep) {
    BitVec a(6), b(6), both(6);
    for (int i = 0; i < 6; ++i) {
      switch (eng() % 3) {
        case 0:
          a.set(i, true);
          both.set(i, true);
          break;
        case 1:
          b.set(i, true);
          both.set(i, true);
          break;
        default:
          break;
      }
    }
    EffectiveAngles ea = effective_angles(params, a);
    EffectiveAngles eb = effective_angles(params, b);
    EffectiveAngles eab = effective_angles(params, both);
    for (std::size_t k = 0; k < ea.alpha.size(); ++k) {
      EXPECT_NEAR(eab.alpha[k], ea.alpha[k] + eb.alpha[k], 1e-12);
      EXPECT_NEAR(eab.beta_y[k], ea.beta_y[k] + eb.beta_y[k], 1e-12);
    }
  }
}

TEST(BuildPlan, ZeroSyndromeKeepsOnlyEntanglers) {
  AnsatzConfig cfg = make_ansatz_config(3, 2, 5, 1);
  ParameterSet params = init_params(cfg, 0.4, 11);
  CircuitPlan plan = build_plan(cfg, params, BitVec(5));
  EXPECT_EQ(plan.gates.size(), 4u);  // B*(Q-1)
  for (const Gate& g : plan.gates) EXPECT_EQ(g.kind, GateKind::Cz);
}

TEST(BuildPlan, FullSyndromeGateCount) {
  // Q=3, B=2: per block 3 RX + 3 RY + 2 CZ = 8 gates, 16 total.
  AnsatzConfig cfg = make_ansatz_config(3, 2, 3, 1);
  ParameterSet params = init_params(cfg, 0.4, 13);
  BitVec syndrome(3);
  for (int i = 0; i < 3; ++i) syndrome.set(i, true);
  CircuitPlan plan = build_plan(cfg, params, syndrome);
  EXPECT_EQ(plan.gates.size(), 16u);
  int rx = 0, ry = 0, cz = 0;
  for (const Gate& g : plan.gates) {
    rx += g.kind == GateKind::Rx;
    ry += g.kind == GateKind::Ry;
    cz += g.kind == GateKind::Cz;
  }
  EXPECT_EQ(rx, 6);
  EXPECT_EQ(ry, 6);
  EXPECT_EQ(cz, 4);
}

TEST(BuildPlan, RotationCountBounded) {
  AnsatzConfig cfg = make_ansatz_config(3, 4, 7, 2);
  ParameterSet params = init_params(cfg, 0.7, 5);
  std::mt19937_64 eng(9);
  for (int rep = 0; rep < 20; ++rep) {
    BitVec syndrome(7);
    for (int i = 0; i < 7; ++i) syndrome.set(i, eng() & 1);
    CircuitPlan plan = build_plan(cfg, params, syndrome);
    int rotations = 0;
    for (const Gate& g : plan.gates)
      rotations += g.kind == GateKind::Rx || g.kind == GateKind::Ry;
    EXPECT_LE(rotations, 2 * 3 * 4);
    if (!syndrome.any()) EXPECT_EQ(rotations, 0);
  }
}

TEST(BuildPlan, TwoQubitChainHasSingleEntangler) {
  AnsatzConfig cfg = make_ansatz_config(2, 1, 1, 1);
  ParameterSet params = ParameterSet::zeros(cfg);
  CircuitPlan plan = build_plan(cfg, params, BitVec(1));
  ASSERT_EQ(plan.gates.size(), 1u);
  EXPECT_EQ(plan.gates[0].a, 0);
  EXPECT_EQ(plan.gates[0].b, 1);
}

TEST(BuildPlan, CnotChainOption) {
  AnsatzConfig cfg = make_ansatz_config(3, 1, 1, 1, Entangler::CnotChain);
  ParameterSet params = ParameterSet::zeros(cfg);
  CircuitPlan plan = build_plan(cfg, params, BitVec(1));
  ASSERT_EQ(plan.gates.size(), 2u);
  for (const Gate& g : plan.gates) EXPECT_EQ(g.kind, GateKind::Cnot);
}

TEST(BuildPlan, PureFunction) {
  AnsatzConfig cfg = make_ansatz_config(3, 3, 4, 1);
  ParameterSet params = init_params(cfg, 0.3, 21);
  BitVec syndrome(4);
  syndrome.set(2, true);
  CircuitPlan p1 = build_plan(cfg, params, syndrome);
  CircuitPlan p2 = build_plan(cfg, params, syndrome);
  ASSERT_EQ(p1.gates.size(), p2.gates.size());
  for (std::size_t i = 0; i < p1.gates.size(); ++i) {
    EXPECT_EQ(p1.gates[i].kind, p2.gates[i].kind);
    EXPECT_EQ(p1.gates[i].a, p2.gates[i].a);
    EXPECT_EQ(p1.gates[i].angle, p2.gates[i].angle);
  }
}

TEST(BuildPlan, ShapeMismatchRejected) {
  AnsatzConfig cfg = make_ansatz_config(3, 2, 4, 1);
  AnsatzConfig other = make_ansatz_config(3, 3, 4, 1);
  ParameterSet params = ParameterSet::zeros(other);
  EXPECT_THROW(build_plan(cfg, params, BitVec(4)), std::invalid_argument);
}

TEST(Checkpoint, RoundTripBitExact) {
  AnsatzConfig cfg = make_ansatz_config(3, 4, 6, 2, Entangler::CnotChain);
  cfg.readout = {2, 0};
  ParameterSet params = init_params(cfg, 2.5, 31);
  std::ostringstream out;
  write_checkpoint(cfg, params, out);
  std::istringstream in(out.str());
  auto [cfg2, params2] = read_checkpoint(in);
  EXPECT_EQ(cfg2.num_qubits, cfg.num_qubits);
  EXPECT_EQ(cfg2.num_blocks, cfg.num_blocks);
  EXPECT_EQ(cfg2.syndrome_length, cfg.syndrome_length);
  EXPECT_EQ(cfg2.readout, cfg.readout);
  EXPECT_EQ(cfg2.entangler, cfg.entangler);
  EXPECT_TRUE(params2 == params);  // %.17g round-trips doubles exactly
}

TEST(AnsatzConfig, Validation) {
  AnsatzConfig cfg = make_ansatz_config(3, 2, 4, 1);
  cfg.readout = {0, 0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.readout = {3};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.readout = {0, 1, 2};
  EXPECT_NO_THROW(cfg.validate());
  cfg.readout = {};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
