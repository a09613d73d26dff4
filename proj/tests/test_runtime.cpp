#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "zoo/primitives.hpp"
#include "zoo/runtime.hpp"

using namespace zoo;

TEST_CASE("nd_map applies elementwise and preserves shape") {
  Ndarray a({3}, {1, 2, 3});
  Ndarray out = nd_map([](double x) { return x * 2.0; }, a);
  CHECK(out.data == std::vector<double>{2, 4, 6});

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    std::size_t rows = 1 + rng() % 8, cols = 1 + rng() % 8;
    Ndarray m = Ndarray::filled({rows, cols}, 1.5);
    CHECK(nd_map([](double x) { return x - 1.0; }, m).shape == m.shape);
  }
}

TEST_CASE("nd_fold reduces left-to-right from the initial value") {
  Ndarray ones = Ndarray::filled({1000}, 1.0);
  CHECK(nd_fold([](double a, double b) { return a + b; }, 0.0, ones) == 1000.0);

  // left-to-right: subtraction is order-sensitive
  Ndarray seq({3}, {1, 2, 3});
  CHECK(nd_fold([](double a, double b) { return a - b; }, 0.0, seq) == -6.0);
}

TEST_CASE("fold of arange matches the closed-form sum") {
  std::mt19937_64 rng(5);
  auto plus = [](double a, double b) { return a + b; };
  for (int i = 0; i < 12; ++i) {
    std::size_t n = 1 + rng() % 1000000;
    Ndarray a = Ndarray::arange(n);
    double expected = static_cast<double>(n) * (n - 1) / 2.0;
    CHECK(nd_fold(plus, 0.0, a) == expected);
  }
}

TEST_CASE("fold over a concatenation equals fold of folds for addition") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    std::size_t n1 = 1 + rng() % 100, n2 = 1 + rng() % 100;
    std::vector<double> d1, d2;
    for (std::size_t k = 0; k < n1; ++k) d1.push_back(double(rng() % 1000));
    for (std::size_t k = 0; k < n2; ++k) d2.push_back(double(rng() % 1000));
    std::vector<double> all = d1;
    all.insert(all.end(), d2.begin(), d2.end());

    auto plus = [](double a, double b) { return a + b; };
    double whole = nd_fold(plus, 0.0, Ndarray({n1 + n2}, all));
    double parts = nd_fold(plus, nd_fold(plus, 0.0, Ndarray({n1}, d1)),
                           Ndarray({n2}, d2));
    CHECK(whole == parts);
  }
}

TEST_CASE("ndarray invariants are enforced") {
  CHECK_THROWS_AS(Ndarray({}, {}), ShapeMismatchError);
  CHECK_THROWS_AS(Ndarray({2, 3}, {1, 2, 3}), ShapeMismatchError);
  CHECK_THROWS_AS(Ndarray({0}, {}), ShapeMismatchError);
}

TEST_CASE("gradient descent finds the minimum of x^2") {
  GdConfig cfg;
  cfg.init = 5.0;
  cfg.step_size = 0.1;
  auto r = gradient_descent([](double x) { return x * x; }, cfg);
  CHECK(r.converged);
  CHECK(std::fabs(r.argmin) < 1e-6);
}

TEST_CASE("gradient descent solves the cubic benchmark function") {
  // f' = 3x^2 - 4x vanishes at 4/3 with f'' > 0 there
  GdConfig cfg;
  cfg.init = 4.0;
  auto f = [](double x) { return x * x * x - 2.0 * x * x + 2.0; };
  auto r = gradient_descent(f, cfg);
  CHECK(r.converged);
  CHECK(std::fabs(r.argmin - 4.0 / 3.0) < 1e-4);

  // same answer with an injected analytic derivative
  GdConfig analytic = cfg;
  analytic.derivative = [](double x) { return 3.0 * x * x - 4.0 * x; };
  auto r2 = gradient_descent(f, analytic);
  CHECK(std::fabs(r2.argmin - 4.0 / 3.0) < 1e-4);
}

TEST_CASE("gradient descent on sin(x) from 5 lands at 3*pi/2") {
  GdConfig cfg;
  cfg.init = 5.0;
  auto r = gradient_descent([](double x) { return std::sin(x); }, cfg);
  CHECK(r.converged);
  CHECK(std::fabs(r.argmin - 3.0 * M_PI / 2.0) < 1e-4);
}

TEST_CASE("quadratics converge whenever the step stays under 2/L") {
  for (double a : {0.5, 1.0, 2.0}) {
    GdConfig cfg;
    cfg.init = 7.0;
    cfg.step_size = 0.9 * (2.0 / (2.0 * a));  // L = 2a
    auto r = gradient_descent([a](double x) { return a * x * x; }, cfg);
    CHECK(r.converged);
    CHECK(std::fabs(r.argmin) < 1e-5);
  }
}

TEST_CASE("an oversized step on a quadratic diverges") {
  GdConfig cfg;
  cfg.init = 1.0;
  cfg.step_size = 2.0;  // amplification factor |1 - 2*eta| = 3
  // analytic derivative: the finite difference underflows once x is large
  cfg.derivative = [](double x) { return 2.0 * x; };
  CHECK_THROWS_AS(gradient_descent([](double x) { return x * x; }, cfg),
                  DivergedError);

  // a single overshoot past the guard, with the numeric derivative
  GdConfig steep;
  steep.init = 35.0;
  steep.step_size = 1.0;
  CHECK_THROWS_AS(
      gradient_descent([](double x) { return std::exp(x) - x; }, steep),
      DivergedError);
}

TEST_CASE("running out of iterations is a flagged success") {
  GdConfig cfg;
  cfg.init = 5.0;
  cfg.step_size = 1e-6;
  cfg.tol = 1e-15;
  cfg.max_iters = 100;
  auto r = gradient_descent([](double x) { return x * x; }, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 100);
}

TEST_CASE("a random start in [0, 10] is deterministic per seed") {
  GdConfig cfg;
  cfg.seed = 99;
  auto f = [](double x) { return (x - 5.0) * (x - 5.0); };
  auto r1 = gradient_descent(f, cfg);
  auto r2 = gradient_descent(f, cfg);
  CHECK(r1.argmin == r2.argmin);
  CHECK(std::fabs(r1.argmin - 5.0) < 1e-5);
}

TEST_CASE("invalid descent configs are rejected") {
  GdConfig cfg;
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(gradient_descent([](double x) { return x * x; }, cfg), Error);
}

TEST_CASE("conv2d_valid on all-ones inputs") {
  Ndarray input = Ndarray::filled({3, 3}, 1.0);
  Ndarray kernel = Ndarray::filled({2, 2}, 1.0);
  Ndarray out = conv2d_valid(input, kernel);
  CHECK(out.shape == std::vector<std::size_t>{2, 2});
  for (double v : out.data) CHECK(v == 4.0);
}

TEST_CASE("the identity kernel reproduces the input") {
  std::mt19937_64 rng(8);
  Ndarray input = Ndarray::zeros({5, 7});
  for (auto& v : input.data) v = double(rng() % 100) / 3.0;
  Ndarray out = conv2d_valid(input, Ndarray({1, 1}, {1.0}));
  CHECK(out == input);
}

TEST_CASE("conv2d_valid matches the naive quadruple loop") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t h = 1 + rng() % 16, w = 1 + rng() % 16;
    std::size_t kh = 1 + rng() % h, kw = 1 + rng() % w;
    Ndarray input = Ndarray::zeros({h, w});
    Ndarray kernel = Ndarray::zeros({kh, kw});
    for (auto& v : input.data) v = double(rng() % 2000) / 997.0 - 1.0;
    for (auto& v : kernel.data) v = double(rng() % 2000) / 997.0 - 1.0;

    Ndarray fast = conv2d_valid(input, kernel);
    REQUIRE(fast.shape ==
            std::vector<std::size_t>{h - kh + 1, w - kw + 1});
    for (std::size_t i = 0; i + kh <= h; ++i)
      for (std::size_t j = 0; j + kw <= w; ++j) {
        double acc = 0.0;
        for (std::size_t u = 0; u < kh; ++u)
          for (std::size_t v = 0; v < kw; ++v)
            acc += input.at2(i + u, j + v) * kernel.at2(u, v);
        CHECK(std::fabs(fast.at2(i, j) - acc) <= 1e-12);
      }
  }
}

TEST_CASE("oversized kernels are rejected") {
  CHECK_THROWS_AS(
      conv2d_valid(Ndarray::filled({2, 2}, 1.0), Ndarray::filled({3, 3}, 1.0)),
      ShapeMismatchError);
  CHECK_THROWS_AS(
      conv2d_valid(Ndarray::filled({4}, 1.0), Ndarray::filled({2, 2}, 1.0)),
      ShapeMismatchError);
}

TEST_CASE("execute runs the demo pipeline to the frozen French label") {
  zt::TempDir tmp("rt");
  PackageStore store(tmp.path);
  Service pipeline = zt::build_usecase_pipeline(store, 0);
  auto registry = default_registry();

  DataType png = DataType::media(MediaBase::Image, "png");
  TypedValue input = TypedValue::of_media(png, zt::demo_input_png());
  TypedValue out = execute(pipeline, {input}, registry);
  CHECK(out.dtype == DataType::media(MediaBase::Text, "fr"));
  CHECK(out.as_bytes() == zt::kExpectedFrenchLabel);

  // repeated runs are byte-identical
  TypedValue again = execute(pipeline, {input}, registry);
  CHECK(out == again);
}

TEST_CASE("zero-input services execute with an empty input list") {
  zt::TempDir tmp("rt");
  PackageStore store(tmp.path);
  auto refs = zt::publish_fixture_packages(store, 0);
  Service style = create_service(refs.at("style"), store, 0).at("image_gen");
  auto registry = default_registry();
  TypedValue out = execute(style, {}, registry);
  CHECK(out.as_bytes() == stubs::style_image());
}

TEST_CASE("input arity and types are checked before running") {
  zt::TempDir tmp("rt");
  PackageStore store(tmp.path);
  Service pipeline = zt::build_usecase_pipeline(store, 0);
  auto registry = default_registry();

  DataType jpeg = DataType::media(MediaBase::Image, "jpeg");
  try {
    execute(pipeline, {TypedValue::of_media(jpeg, "blob")}, registry);
    FAIL("expected InputTypeMismatchError");
  } catch (const InputTypeMismatchError& e) {
    CHECK(e.position == 0);
    CHECK(e.expected == "png_img");
    CHECK(e.found == "jpeg_img");
  }
  CHECK_THROWS_AS(execute(pipeline, {}, registry), InputTypeMismatchError);
}

TEST_CASE("missing primitives are reported with package and name") {
  zt::TempDir tmp("rt");
  PackageStore store(tmp.path);
  Service pipeline = zt::build_usecase_pipeline(store, 0);
  PrimitiveRegistry empty;
  DataType png = DataType::media(MediaBase::Image, "png");
  try {
    execute(pipeline, {TypedValue::of_media(png, "blob")}, empty);
    FAIL("expected MissingPrimitiveError");
  } catch (const MissingPrimitiveError& e) {
    CHECK_FALSE(e.package_id.empty());
    CHECK_FALSE(e.name.empty());
  }
}

TEST_CASE("primitive failures carry the underlying detail") {
  DataType i = DataType::primitive(PrimitiveKind::Int);
  Service s = zt::leaf_service("boom", "pkg00", "v-1", {{}, i});

  PrimitiveRegistry reg;
  reg.add("pkg00", "boom", {{}, i}, [](const std::vector<TypedValue>&) -> TypedValue {
    throw std::runtime_error("stack blown");
  });
  try {
    execute(s, {}, reg);
    FAIL("expected PrimitiveFailureError");
  } catch (const PrimitiveFailureError& e) {
    CHECK(std::string(e.what()).find("stack blown") != std::string::npos);
  }

  // declared output type is enforced
  PrimitiveRegistry lying;
  lying.add("pkg00", "boom", {{}, i}, [](const std::vector<TypedValue>&) {
    return TypedValue::of_string("not an int");
  });
  CHECK_THROWS_AS(execute(s, {}, lying), PrimitiveFailureError);
}
