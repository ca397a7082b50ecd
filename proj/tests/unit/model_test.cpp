#include "ritzgn/model.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace ritzgn {
namespace {

using testing::fd_gradient;
using testing::fd_jacobian;
using testing::rel_err;

const double kPi = std::numbers::pi;

NetworkModel single_relu2() { return NetworkModel(1, 1, ActivationSpec::relu_pow(2)); }
ParamVector unit_neuron() { return (ParamVector(3) << 1.0, 1.0, 0.0).finished(); }

TEST(Network, ZeroParametersGiveZeroField) {
  const NetworkModel m(7, 1, ActivationSpec::tanh());
  const ParamVector t = ParamVector::Zero(m.num_params());
  for (double x : {-1.0, -0.3, 0.0, 0.8}) {
    EXPECT_EQ(eval_u(m, t, x), 0.0);
    EXPECT_EQ(grad_x_u(m, t, std::span<const double>(&x, 1))[0], 0.0);
    EXPECT_EQ(laplacian_u(m, t, std::span<const double>(&x, 1)), 0.0);
  }
}

TEST(Network, SingleReluSquaredNeuron) {
  const Model m = single_relu2();
  const ParamVector t = unit_neuron();
  const double x = 0.5;
  const std::span<const double> xs(&x, 1);
  EXPECT_DOUBLE_EQ(eval_u(m, t, x), 0.25);
  EXPECT_DOUBLE_EQ(grad_x_u(m, t, xs)[0], 1.0);
  EXPECT_DOUBLE_EQ(laplacian_u(m, t, xs), 2.0);
  const Vector g = grad_theta_u(m, t, xs);
  EXPECT_DOUBLE_EQ(g[0], 0.25);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
  EXPECT_DOUBLE_EQ(g[2], 1.0);
  const Vector gl = grad_theta_laplacian_u(m, t, xs);
  EXPECT_DOUBLE_EQ(gl[0], 2.0);
  EXPECT_DOUBLE_EQ(gl[1], 4.0);  // ∂(2a·w²)/∂w = 4aw
  EXPECT_DOUBLE_EQ(gl[2], 0.0);
}

TEST(Network, ZeroOuterWeightsLeaveOnlyTheABlock) {
  const NetworkModel net(5, 1, ActivationSpec::tanh());
  Rng rng(3);
  ParamVector t = testing::random_theta(rng, net.num_params());
  t.head(5).setZero();
  const double x = 0.3;
  const std::span<const double> xs(&x, 1);
  const Matrix dgx = grad_theta_grad_x_u(net, t, xs);
  EXPECT_GT(dgx.topRows(5).norm(), 0.0);
  EXPECT_EQ(dgx.bottomRows(10).norm(), 0.0);
  const Vector dl = grad_theta_laplacian_u(net, t, xs);
  EXPECT_EQ(dl.tail(10).norm(), 0.0);
}

TEST(Network, KinkUsesTheZeroConvention) {
  const Model m = single_relu2();
  ParamVector t = unit_neuron();
  const double x = 0.0;  // w·x + b = 0
  EXPECT_EQ(laplacian_u(m, t, std::span<const double>(&x, 1)), 0.0);
}

TEST(Network, ReluPowerBelowTwoIsRejected) {
  EXPECT_THROW(NetworkModel(3, 1, ActivationSpec::relu_pow(1)), ConfigError);
  EXPECT_NO_THROW(NetworkModel(3, 1, ActivationSpec::relu_pow(2)));
}

TEST(Network, LengthMismatchThrows) {
  const Model m = NetworkModel(4, 1, ActivationSpec::tanh());
  EXPECT_THROW((void)eval_u(m, ParamVector::Zero(11), 0.0), DimensionError);
}

TEST(Network, ParameterCountFollowsTheMask) {
  EXPECT_EQ(NetworkModel(128, 1, ActivationSpec::tanh()).num_params(), 384);
  EXPECT_EQ(NetworkModel(10, 3, ActivationSpec::tanh()).num_params(), 50);
  EXPECT_EQ(NetworkModel(10, 1, ActivationSpec::tanh(), {true, false, true}).num_params(), 20);
}

TEST(Network, PackUnpackIsABijection) {
  const NetworkModel net(6, 2, ActivationSpec::tanh());
  Rng rng(11);
  const ParamVector t = testing::random_theta(rng, net.num_params());
  const auto p = net.unpack(t);
  EXPECT_EQ(net.pack(p.a, p.w, p.b), t);
}

// Property: every analytic derivative matches central differences on random tanh draws.
TEST(NetworkProperty, DerivativesMatchFiniteDifferences) {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = testing::random_tanh_net(rng);
    const Model m = d.model;
    const double x = rng.uniform(-1.0, 1.0);
    const auto at = [&](const ParamVector& t, double y) { return eval_u(m, t, y); };

    const double hx = 1e-6;
    const double fd_dx = (at(d.theta, x + hx) - at(d.theta, x - hx)) / (2 * hx);
    EXPECT_LT(rel_err(grad_x_u(m, d.theta, std::span<const double>(&x, 1))[0], fd_dx), 1e-6);

    const double h2 = 1e-4;
    const double fd_lap = (at(d.theta, x + h2) - 2 * at(d.theta, x) + at(d.theta, x - h2)) / (h2 * h2);
    EXPECT_LT(rel_err(laplacian_u(m, d.theta, std::span<const double>(&x, 1)), fd_lap), 1e-5);

    const Vector g = grad_theta_u(m, d.theta, std::span<const double>(&x, 1));
    EXPECT_LT(rel_err(g, fd_gradient([&](const ParamVector& t) { return at(t, x); }, d.theta, 1e-6)), 1e-6);

    const auto ux = [&](const ParamVector& t) {
      return Vector::Constant(1, grad_x_u(m, t, std::span<const double>(&x, 1))[0]);
    };
    const Matrix mixed = grad_theta_grad_x_u(m, d.theta, std::span<const double>(&x, 1));
    EXPECT_LT(rel_err(Matrix(mixed.transpose()), fd_jacobian(ux, d.theta, 1e-6)), 1e-5);

    const auto lap = [&](const ParamVector& t) { return laplacian_u(m, t, std::span<const double>(&x, 1)); };
    EXPECT_LT(rel_err(grad_theta_laplacian_u(m, d.theta, std::span<const double>(&x, 1)),
                      fd_gradient(lap, d.theta, 1e-6)),
              1e-5);
  }
}

TEST(NetworkProperty, ReluDerivativesMatchAwayFromKinks) {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(3));
    const NetworkModel net(4, 1, ActivationSpec::relu_pow(k));
    const Model m = net;
    const ParamVector t = testing::random_theta(rng, net.num_params());
    const double x = rng.uniform(-1.0, 1.0);
    const auto p = net.unpack(t);
    bool near_kink = false;
    for (int i = 0; i < 4; ++i) near_kink = near_kink || std::abs(p.w(i, 0) * x + p.b[i]) < 1e-2;
    if (near_kink) continue;
    const Vector g = grad_theta_u(m, t, std::span<const double>(&x, 1));
    EXPECT_LT(rel_err(g, fd_gradient([&](const ParamVector& s) { return eval_u(m, s, x); }, t, 1e-6)), 1e-6);
    const auto lap = [&](const ParamVector& s) { return laplacian_u(m, s, std::span<const double>(&x, 1)); };
    EXPECT_LT(rel_err(grad_theta_laplacian_u(m, t, std::span<const double>(&x, 1)), fd_gradient(lap, t, 1e-6)),
              1e-5);
  }
}

// u is unchanged by (w, b) → (λw, λb), a → a/λ^k for λ > 0.
TEST(NetworkProperty, ReluScalingInvariance) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(3));
    const NetworkModel net(3, 1, ActivationSpec::relu_pow(k));
    const ParamVector t = testing::random_theta(rng, net.num_params());
    const double lambda = rng.uniform(0.2, 5.0);
    auto p = net.unpack(t);
    const ParamVector s = net.pack(p.a / std::pow(lambda, k), p.w * lambda, p.b * lambda);
    const double x = rng.uniform(-1.0, 1.0);
    EXPECT_NEAR(eval_u(net, t, x), eval_u(net, s, x), 1e-12 * (1.0 + std::abs(eval_u(net, t, x))));
  }
}

TEST(NetworkProperty, FrozenWeightsDropTheirColumns) {
  Rng rng(8);
  const NetworkModel full(3, 1, ActivationSpec::tanh());
  const NetworkModel reduced(3, 1, ActivationSpec::tanh(), {true, false, true});
  const ParamVector tr = testing::random_theta(rng, reduced.num_params());
  const auto p = reduced.unpack(tr);
  const ParamVector tf = full.pack(p.a, p.w, p.b);
  const double x = 0.4;
  const Vector gf = grad_theta_u(full, tf, std::span<const double>(&x, 1));
  const Vector gr = grad_theta_u(reduced, tr, std::span<const double>(&x, 1));
  EXPECT_EQ(gr.head(3), gf.head(3));
  EXPECT_EQ(gr.tail(3), gf.tail(3));
}

TEST(Fem, InterpolatesAtNodes) {
  const FemModel fem = FemModel::uniform({-1.0, 1.0}, 101);
  const ParamVector t = fem.interpolate([](double x) { return std::cos(kPi * x); });
  for (double x : fem.nodes()) EXPECT_EQ(fem.eval(t, x), std::cos(kPi * x));
}

TEST(Fem, PartitionOfUnity) {
  const FemModel fem({-1.0, -0.7, -0.1, 0.2, 0.25, 1.0});
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    double sum = 0.0;
    for (int j = 0; j < 6; ++j) sum += fem.hat(j, x);
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
}

TEST(Fem, LinearInThetaWithFixedBasisGradient) {
  const Model m = FemModel::uniform({-1.0, 1.0}, 11);
  Rng rng(4);
  const ParamVector t1 = testing::random_theta(rng, 11), t2 = testing::random_theta(rng, 11);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    const std::span<const double> xs(&x, 1);
    EXPECT_NEAR(eval_u(m, t1 + 2.0 * t2, x), eval_u(m, t1, x) + 2.0 * eval_u(m, t2, x), 1e-13);
    EXPECT_EQ(grad_theta_u(m, t1, xs), grad_theta_u(m, t2, xs));
    EXPECT_EQ(grad_theta_grad_x_u(m, t1, xs), grad_theta_grad_x_u(m, t2, xs));
    EXPECT_EQ(grad_theta_laplacian_u(m, t1, xs).norm(), 0.0);
    EXPECT_NEAR(grad_theta_u(m, t1, xs).sum(), 1.0, 1e-14);
  }
}

TEST(Fem, GradThetaIsTheHatVector) {
  const FemModel fem = FemModel::uniform({0.0, 1.0}, 5);
  const double x = 0.3;  // between nodes 0.25 and 0.5
  const Vector g = grad_theta_u(fem, ParamVector::Zero(5), std::span<const double>(&x, 1));
  EXPECT_NEAR(g[1], 0.8, 1e-14);
  EXPECT_NEAR(g[2], 0.2, 1e-14);
  EXPECT_EQ(g[0] + g[3] + g[4], 0.0);
  const Matrix d = grad_theta_grad_x_u(fem, ParamVector::Zero(5), std::span<const double>(&x, 1));
  EXPECT_NEAR(d(1, 0), -4.0, 1e-12);
  EXPECT_NEAR(d(2, 0), 4.0, 1e-12);
}

TEST(Fem, RepeatedFrameEntriesShareAHat) {
  const FemModel fem({-1.0, 0.0, 1.0}, {0, 1, 2, 1});
  EXPECT_EQ(fem.num_params(), 4);
  const ParamVector t = (ParamVector(4) << 0.0, 0.5, 0.0, 0.5).finished();
  EXPECT_DOUBLE_EQ(fem.eval(t, 0.0), 1.0);
}

TEST(Fem, RejectsUnsortedMesh) { EXPECT_THROW(FemModel({0.0, 0.0, 1.0}), ConfigError); }

TEST(Init, GivenIsVerbatim) {
  const Model m = NetworkModel(3, 1, ActivationSpec::tanh());
  InitOptions o;
  o.scheme = InitScheme::given;
  o.given = (ParamVector(9) << 1, 2, 3, 4, 5, 6, 7, 8, 9).finished();
  EXPECT_EQ(init_params(m, o), o.given);
}

TEST(Init, SameSeedSameVector) {
  const Model m = NetworkModel(20, 1, ActivationSpec::tanh());
  for (InitScheme s : {InitScheme::uniform_box, InitScheme::normal, InitScheme::normal_slopes}) {
    InitOptions o;
    o.scheme = s;
    o.seed = 42;
    EXPECT_EQ(init_params(m, o), init_params(m, o));
    InitOptions p = o;
    p.seed = 43;
    EXPECT_NE(init_params(m, o), init_params(m, p));
  }
}

TEST(Init, UniformBoxBiasRange) {
  const NetworkModel net(10000, 1, ActivationSpec::tanh());
  InitOptions o;
  o.scheme = InitScheme::uniform_box;
  o.delta = 0.1;
  o.a_scale = 0.5;
  o.seed = 7;
  const auto p = net.unpack(init_params(net, o));
  EXPECT_LE(p.b.maxCoeff(), 1.1);
  EXPECT_GE(p.b.minCoeff(), -1.1);
  EXPECT_GT(p.b.maxCoeff(), 1.05);  // the range is actually used
  EXPECT_LE(p.a.cwiseAbs().maxCoeff(), 0.5);
}

TEST(Init, NodeAdaptedSeparatesEveryGap) {
  const NetworkModel net(12, 1, ActivationSpec::tanh());
  InitOptions o;
  o.scheme = InitScheme::node_adapted;
  o.nodes = {-1.0, -0.5, 0.0, 0.5, 1.0};
  o.sharpness = 2.0;
  const auto p = net.unpack(init_params(net, o));
  for (int i = 0; i < 4; ++i) {
    const double centre = -p.b[i] / p.w(i, 0);
    EXPECT_NEAR(centre, -0.75 + 0.5 * i, 1e-12);
    EXPECT_NEAR(std::abs(p.w(i, 0)), 4.0, 1e-12);
  }
}

}  // namespace
}  // namespace ritzgn
