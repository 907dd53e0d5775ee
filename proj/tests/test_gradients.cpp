#include <doctest.h>

#include "gradient_suite.hpp"

using namespace sdlab;
using namespace sdlab::testing;

TEST_CASE("mlp backward matches central differences") {
  CHECK(mlp_gradient_suite(25, 1) <= 1e-4);
}

TEST_CASE("gin backward matches central differences, edge weights included") {
  CHECK(gin_gradient_suite(25, 2) <= 1e-4);
}

TEST_CASE("pool_mean backward matches central differences") {
  CHECK(pool_gradient_suite(20, 3) <= 1e-4);
}

TEST_CASE("size-constrained loss gradient through the whole model") {
  CHECK(model_loss_gradient_suite(20, 4, Objective::size_constrained, false) <= 1e-4);
  CHECK(model_loss_gradient_suite(20, 5, Objective::size_constrained, true) <= 1e-4);
}

TEST_CASE("kl-bernoulli loss gradient through the whole model") {
  CHECK(model_loss_gradient_suite(20, 6, Objective::kl_bernoulli, false) <= 1e-4);
  CHECK(model_loss_gradient_suite(20, 7, Objective::kl_bernoulli, true) <= 1e-4);
}

TEST_CASE("prediction gradient with respect to the mask") {
  CHECK(mask_gradient_suite(25, 8) <= 1e-4);
}

TEST_CASE("library finite differences agree with the test oracle") {
  RngStream rng(9);
  auto p = make_mlp({3, 4, 1}, Activation::sigmoid, Activation::identity, rng);
  std::vector<double> x = {0.2, -0.4, 0.7};
  auto fn = [&](std::span<const double> v) {
    DenseMatrix in(1, 3, std::vector<double>(v.begin(), v.end()));
    return mlp_forward(p, in).output(0, 0);
  };
  auto lib = finite_diff_grad(fn, x);
  auto back = mlp_backward(p, mlp_forward(p, DenseMatrix(1, 3, x)).cache, DenseMatrix(1, 1, 1.0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(relative_error(back.grad_input.data()[i], lib[i]) <= 1e-4);
}
