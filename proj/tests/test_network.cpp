#include <cstring>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "idpdb/errors.hpp"
#include "idpdb/network.hpp"

using namespace idpdb;
using idpdb::testing::random_input;
using idpdb::testing::random_network;
using idpdb::testing::reference_forward;

TEST_CASE("zero weights return the output bias") {
  Network net = Network::zeros({{3, 4, 2}});
  net.layer(1).bias = {1.0, -1.0};
  const Vector x{0.2, 0.9, 0.4};
  CHECK(net.forward(x) == Vector{1.0, -1.0});
}

TEST_CASE("a single hidden neuron passes nonnegative input through") {
  Network net = Network::zeros({{1, 1, 1}});
  net.layer(0).weights(0, 0) = 1.0;
  net.layer(1).weights(0, 0) = 1.0;
  for (double v : {0.0, 0.25, 1.0}) CHECK(net.forward(Vector{v})[0] == v);
}

TEST_CASE("forward agrees with an independent implementation") {
  CounterRng rng(11);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const Architecture& arch : {Architecture{{2, 2, 2}}, Architecture{{3, 5, 4, 3}}}) {
      const Network net = random_network(arch, seed);
      const Vector x = random_input(arch.input_size(), rng);
      const Vector got = net.forward(x);
      const Vector want = reference_forward(net, x);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("output layer has no ReLU") {
  Network net = Network::zeros({{1, 1, 2}});
  net.layer(1).bias = {-3.0, -5.0};
  CHECK(net.forward(Vector{0.5}) == Vector{-3.0, -5.0});
}

TEST_CASE("confidence examples") {
  CHECK(confidence(Vector{0.6, 0.4}, 0) == doctest::Approx(0.2));
  CHECK(confidence(Vector{0.5, 0.5}, 0) == 0.0);
  CHECK(confidence(Vector{1.0, 3.0, 2.0}, 1) == 1.0);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax(Vector{0.6, 0.4}) == 0);
  CHECK(argmax(Vector{0.5, 0.5}) == 0);
  CHECK(argmax(Vector{0.0, 1.0, 0.0}) == 1);
  CHECK(argmax(Vector{2.0, 3.0, 3.0}) == 1);
}

TEST_CASE("confidence of the prediction is nonnegative and positive confidence implies prediction") {
  CounterRng rng(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Network net = random_network({{2, 6, 3}}, seed);
    for (int i = 0; i < 200; ++i) {
      const Vector x = random_input(2, rng);
      const std::size_t p = predict(net, x);
      CHECK(confidence(net, x, p) >= 0.0);
      for (std::size_t c = 0; c < 3; ++c) {
        if (confidence(net, x, c) > 0.0) CHECK(p == c);
      }
    }
  }
}

TEST_CASE("forward is bit-reproducible") {
  const Network net = random_network({{4, 8, 8, 3}}, 2);
  const Vector x{0.1, 0.2, 0.3, 0.4};
  const Vector a = net.forward(x);
  const Vector b = net.forward(x);
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("dimension mismatch names the layer and expected size") {
  const Network net = random_network({{3, 2, 2}}, 0);
  try {
    net.forward(Vector{0.1, 0.2});
    FAIL("expected DimensionMismatch");
  } catch (const DimensionMismatch& e) {
    const std::string msg = e.what();
    CHECK(msg.find("layer 0") != std::string::npos);
    CHECK(msg.find('3') != std::string::npos);
  }
}

TEST_CASE("architecture validation") {
  const Architecture no_hidden{{2, 2}}, empty_layer{{2, 0, 2}}, tiny{{1, 1, 1}}, deep{{2, 4, 3, 2}};
  CHECK_THROWS_AS(no_hidden.validate(), InvalidArgument);
  CHECK_THROWS_AS(empty_layer.validate(), InvalidArgument);
  CHECK_NOTHROW(tiny.validate());
  CHECK(deep.hidden_neurons() == 7);
}

TEST_CASE("constructor rejects bad shapes and non-finite values") {
  std::vector<Layer> layers{{Matrix(2, 2), Vector(2)}, {Matrix(2, 3), Vector(2)}};
  CHECK_THROWS_AS(Network({{2, 2, 2}}, layers), DimensionMismatch);
  layers[1] = {Matrix(2, 2), Vector(2)};
  layers[0].bias[1] = std::nan("");
  CHECK_THROWS_AS(Network({{2, 2, 2}}, layers), InvalidArgument);
}

TEST_CASE("network JSON round-trips bitwise") {
  const Network net = random_network({{3, 4, 2}}, 17);
  const auto doc = to_json(net);
  CHECK(doc.contains("architecture"));
  CHECK(doc["layers"][0].contains("weights"));
  CHECK(doc["layers"][0].contains("bias"));
  CHECK(network_from_json(doc) == net);

  const auto path = std::filesystem::temp_directory_path() / "idpdb_net_roundtrip.json";
  save_network(net, path);
  const Network back = load_network(path);
  CHECK(back == net);
  const Vector a = back.flatten(), b = net.flatten();
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("flatten lists weights then biases per layer") {
  const Network net = random_network({{2, 3, 2}}, 1);
  const Vector f = net.flatten();
  CHECK(f.size() == net.parameter_count());
  CHECK(f.size() == 2 * 3 + 3 + 3 * 2 + 2);
  CHECK(f[0] == net.layer(0).weights(0, 0));
  CHECK(f[6] == net.layer(0).bias[0]);
  CHECK(f.back() == net.layer(1).bias[1]);
}
