#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "idpdb/access.hpp"
#include "idpdb/errors.hpp"
#include "idpdb/pipeline.hpp"

using namespace idpdb;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("idpdb_pipeline_" + name);
  std::filesystem::remove_all(p);
  return p;
}

// Label 1 everywhere, whatever the input.
Network constant_net() {
  Network n = Network::zeros({{2, 2, 2}});
  n.layer(1).bias = {0.0, 1.0};
  return n;
}

}  // namespace

TEST_CASE("synthetic data follows the sine boundary") {
  const Dataset d = generate_synthetic_2d(300, 7);
  CHECK(d.size() == 300);
  CHECK(d.dim() == 2);
  CHECK(d.num_classes() == 2);
  std::size_t ones = 0;
  for (const auto& p : d.points()) {
    CHECK(p.label == synthetic_label(p.features[0], p.features[1]));
    CHECK(p.features[0] >= 0.0);
    CHECK(p.features[1] <= 1.0);
    ones += p.label;
  }
  CHECK(ones >= 135);
  CHECK(ones <= 165);
  CHECK(synthetic_label(0.25, 0.8) == 1);
  CHECK(synthetic_label(0.25, 0.7) == 0);
  CHECK(synthetic_label(0.75, 0.3) == 1);
}

TEST_CASE("synthetic data is byte-identical for a seed") {
  const auto a = scratch("a.csv"), b = scratch("b.csv");
  save_dataset_csv(generate_synthetic_2d(50, 3), a);
  save_dataset_csv(generate_synthetic_2d(50, 3), b);
  CHECK(read_file(a) == read_file(b));
  CHECK_FALSE(generate_synthetic_2d(50, 3) == generate_synthetic_2d(50, 4));
  CHECK(load_dataset_csv(a) == generate_synthetic_2d(50, 3));
  CHECK_THROWS_AS(generate_synthetic_2d(1, 0), InvalidArgument);
}

TEST_CASE("a small network learns the synthetic boundary") {
  const Dataset d = generate_synthetic_2d(200, 1);
  const Network net = train(d, {{2, 16, 2}}, {400, 10, 0.5, 1});
  CHECK(accuracy(net, d) >= 0.9);
}

TEST_CASE("grid covers the unit square") {
  const Network net = constant_net();
  const auto rows = compute_boundary_grid(net, {Beta(0.5), Beta(0.5)}, nullptr, 10);
  REQUIRE(rows.size() == 100);
  CHECK(rows.front().x1 == 0.0);
  CHECK(rows.front().x2 == 0.0);
  CHECK(rows.back().x1 == 1.0);
  CHECK(rows.back().x2 == 1.0);
  for (const auto& r : rows) {
    CHECK(r.predicted == 1);
    CHECK(r.confidence == 1.0);
    CHECK(r.above_bound);
    CHECK_FALSE(r.agreement.has_value());
  }
  const auto one = compute_boundary_grid(net, {Beta(0.5), Beta(0.5)}, nullptr, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].x1 == 0.5);
  CHECK_THROWS_AS(compute_boundary_grid(net, {Beta(0.5), Beta(0.5)}, nullptr, 0), InvalidArgument);
  CHECK_THROWS_AS(compute_boundary_grid(Network::zeros({{3, 2, 2}}), {Beta(0.5), Beta(0.5)}, nullptr, 4),
                  DimensionMismatch);
}

TEST_CASE("identical family members agree everywhere") {
  LooFamily f;
  f.full = constant_net();
  f.omitted = {{0, constant_net()}, {1, constant_net()}};
  const auto rows = compute_boundary_grid(f.full, {Beta(2.0), Beta(2.0)}, &f, 5);
  for (const auto& r : rows) {
    REQUIRE(r.agreement.has_value());
    CHECK(*r.agreement);
    CHECK_FALSE(r.above_bound);
  }
}

TEST_CASE("disagreement stays at or below the exact bound") {
  const Dataset d = generate_synthetic_2d(8, 2);
  const LooFamily f = train_loo_family(d, {{2, 4, 2}}, {30, 4, 0.5, 2});
  BoundOptions opt;
  opt.encode.tau = 0.0;
  opt.bab.workers = 1;
  std::vector<Beta> bounds;
  for (std::size_t c = 0; c < 2; ++c) {
    const BoundResult r = compute_bound(f, c, opt);
    REQUIRE(r.exact);
    bounds.push_back(r.beta);
  }
  const auto rows = compute_boundary_grid(f.full, bounds, &f, 60);
  for (const auto& r : rows) {
    if (!*r.agreement) CHECK_FALSE(r.above_bound);
  }

  const auto csv = scratch("grid.csv");
  write_grid_csv(rows, csv);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x1,x2,confidence,predicted,above_bound,agreement");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 3600);
}

TEST_CASE("bounds files round-trip") {
  BoundsFile b;
  b[0].beta = Beta(0.25);
  b[0].milp_count = 3;
  b[1].beta = Beta::no_leaking_inputs();
  b[1].exact = false;
  b[1].timed_out = true;
  const auto path = scratch("bounds.json");
  save_bounds(b, path);
  const BoundsFile back = load_bounds(path);
  REQUIRE(back.size() == 2);
  CHECK(back.at(0).beta == Beta(0.25));
  CHECK(back.at(0).milp_count == 3);
  CHECK(back.at(1).beta == Beta::no_leaking_inputs());
  CHECK_FALSE(back.at(1).exact);
  CHECK(back.at(1).timed_out);

  const auto bounds = class_bounds(back, 2);
  CHECK(bounds[0] == Beta(0.25));
  CHECK_THROWS_WITH_AS(class_bounds(back, 3), doctest::Contains("--class 2"), IoError);
  CHECK_THROWS_WITH_AS(load_bounds(scratch("missing.json")), doctest::Contains("bound"), IoError);

  std::ofstream(path) << "{\"0\": {\"beta\": \"banana\"}}";
  CHECK_THROWS_AS(load_bounds(path), IoError);
}

TEST_CASE("run configuration validation") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.tau == kDefaultTau);
  CHECK(cfg.milp_time_limit_seconds == 2400.0);
  CHECK(cfg.total_time_limit_seconds == 8.0 * 3600.0);

  RunConfig bad = cfg;
  bad.workers = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.tau = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.epsilon = -0.1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.milp_time_limit_seconds = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.dataset = scratch("nope.csv");
  CHECK_THROWS_AS(bad.validate(), IoError);

  cfg.seed = 9;
  cfg.workers = 3;
  const BoundOptions opt = cfg.bound_options();
  CHECK(opt.bab.workers == 3);
  CHECK(opt.encode.tau == cfg.tau);
  CHECK(opt.limits.time_limit_seconds == cfg.milp_time_limit_seconds);
  CHECK(to_json(cfg)["seed"] == 9);
}
