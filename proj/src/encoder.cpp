#include "idpdb/encoder.hpp"

#include <cmath>
#include <string>

#include "idpdb/errors.hpp"

namespace idpdb {

namespace {

std::string tag(const char* prefix, std::size_t m, std::size_t k) {
  return std::string(prefix) + "_" + std::to_string(m + 1) + "_" + std::to_string(k);
}

void check_bounds(const PreActivationBounds& b, const Architecture& arch, const char* what) {
  if (b.layers.size() != arch.num_layers()) {
    throw DimensionMismatch(std::string(what) + " bounds have the wrong number of layers");
  }
  for (std::size_t m = 0; m < b.layers.size(); ++m) {
    if (b.layers[m].size() != arch.layer_sizes[m + 1]) {
      throw DimensionMismatch(std::string(what) + " bounds layer " + std::to_string(m + 1) + " has the wrong size");
    }
    for (const auto& iv : b.layers[m]) {
      if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
        throw InvalidArgument(std::string(what) + " bounds layer " + std::to_string(m + 1) +
                              " are inconsistent (l > u or non-finite)");
      }
    }
  }
}

// Encodes z = ReLU(zhat) for a neuron with pre-activation bounds [l, u].
// Returns true when a binary was introduced.
bool encode_relu(MilpModel& model, std::size_t zhat, std::size_t z, Interval b,
                 const std::string& name, bool relax) {
  if (b.lo >= 0.0) {
    model.add_eq(name + "_stable_on", {{z, 1.0}, {zhat, -1.0}}, 0.0);
    return false;
  }
  if (b.hi <= 0.0) {
    // z's domain is already [0, 0].
    return false;
  }
  model.add_ge(name + "_ge_pre", {{z, 1.0}, {zhat, -1.0}}, 0.0);
  if (relax) {
    // Triangle: z <= u / (u - l) * (zhat - l).
    const double slope = b.hi / (b.hi - b.lo);
    model.add_le(name + "_tri", {{z, 1.0}, {zhat, -slope}}, -slope * b.lo);
    return false;
  }
  const auto a = model.add_binary("a_" + name);
  model.add_le(name + "_on", {{z, 1.0}, {a, -b.hi}}, 0.0);
  // z <= zhat - l (1 - a)
  model.add_le(name + "_off", {{z, 1.0}, {zhat, -1.0}, {a, -b.lo}}, -b.lo);
  return true;
}

}  // namespace

BoundProblem encode(const Network& net, const IntervalNetwork& hyper, std::size_t c,
                    const PreActivationBounds& net_bounds, const PreActivationBounds& hyper_bounds,
                    const DifferenceIntervals& diffs, const EncodeOptions& options) {
  const Architecture& arch = net.architecture();
  if (!(hyper.architecture() == arch)) throw DimensionMismatch("network and hyper-network architectures differ");
  if (std::isnan(options.tau) || options.tau < 0.0) throw InvalidArgument("tau must be non-negative");
  if (c >= arch.output_size()) throw InvalidArgument("class " + std::to_string(c) + " out of range");
  check_bounds(net_bounds, arch, "network");
  check_bounds(hyper_bounds, arch, "hyper-network");
  if (diffs.post.size() != arch.num_layers()) throw DimensionMismatch("difference intervals do not match the network");

  BoundProblem p;
  MilpModel& model = p.model;
  const std::size_t L = arch.num_layers();

  for (std::size_t k = 0; k < arch.input_size(); ++k) {
    p.inputs.push_back(model.add_variable("x_" + std::to_string(k), 0.0, 1.0));
  }

  // Concrete network: equality weighted sums, exact ReLUs.
  std::vector<std::size_t> prev = p.inputs;
  std::vector<std::vector<std::size_t>> net_post(L);
  for (std::size_t m = 0; m < L; ++m) {
    const auto& layer = net.layer(m);
    const bool hidden = m + 1 < L;
    for (std::size_t k = 0; k < layer.bias.size(); ++k) {
      const Interval b = net_bounds.at(m, k);
      const auto zhat = model.add_variable(tag("nh", m, k), b.lo, b.hi);
      std::vector<Term> terms{{zhat, 1.0}};
      for (std::size_t j = 0; j < prev.size(); ++j) {
        if (layer.weights(k, j) != 0.0) terms.push_back({prev[j], -layer.weights(k, j)});
      }
      model.add_eq(tag("nsum", m, k), std::move(terms), layer.bias[k]);
      if (!hidden) {
        net_post[m].push_back(zhat);
        continue;
      }
      const Interval zr = relu(b);
      const auto z = model.add_variable(tag("nz", m, k), zr.lo, zr.hi);
      if (encode_relu(model, zhat, z, b, tag("nz", m, k), false)) {
        ++p.stats.net_binaries;
      } else {
        ++p.stats.stable_net;
      }
      net_post[m].push_back(z);
    }
    prev = net_post[m];
  }
  p.net_outputs = net_post.back();

  // Hyper-network: weighted sums bracketed by the lower and upper
  // parameter sums (valid because inputs and ReLU outputs are >= 0).
  prev = p.inputs;
  std::vector<std::vector<std::size_t>> hyper_post(L);
  for (std::size_t m = 0; m < L; ++m) {
    const auto& layer = hyper.layer(m);
    const bool hidden = m + 1 < L;
    for (std::size_t k = 0; k < layer.rows; ++k) {
      const Interval b = hyper_bounds.at(m, k);
      const auto zhat = model.add_variable(tag("hh", m, k), b.lo, b.hi);
      std::vector<Term> lower{{zhat, 1.0}};
      std::vector<Term> upper{{zhat, 1.0}};
      for (std::size_t j = 0; j < prev.size(); ++j) {
        const Interval w = layer.weight(k, j);
        if (w.lo != 0.0) lower.push_back({prev[j], -w.lo});
        if (w.hi != 0.0) upper.push_back({prev[j], -w.hi});
      }
      model.add_ge(tag("hsum_lo", m, k), std::move(lower), layer.bias[k].lo);
      model.add_le(tag("hsum_hi", m, k), std::move(upper), layer.bias[k].hi);
      if (!hidden) {
        hyper_post[m].push_back(zhat);
        continue;
      }
      const Interval zr = relu(b);
      const auto z = model.add_variable(tag("hz", m, k), zr.lo, zr.hi);
      const Interval d = diffs.post[m][k];
      const bool unstable = b.lo < 0.0 && b.hi > 0.0;
      const bool relax = options.relax_if_similar && unstable && d.width() <= options.tau;
      if (encode_relu(model, zhat, z, b, tag("hz", m, k), relax)) {
        ++p.stats.hyper_binaries;
      } else if (relax) {
        ++p.stats.relaxed_hyper;
      } else {
        ++p.stats.stable_hyper;
      }
      hyper_post[m].push_back(z);
    }
    prev = hyper_post[m];
  }
  p.hyper_outputs = hyper_post.back();

  if (options.matching_dependencies) {
    for (std::size_t m = 0; m < L; ++m) {
      for (std::size_t k = 0; k < net_post[m].size(); ++k) {
        const Interval d = diffs.post[m][k];
        model.add_constraint(tag("md", m, k), {{hyper_post[m][k], 1.0}, {net_post[m][k], -1.0}}, d.lo, d.hi);
        ++p.stats.matching_rows;
      }
    }
  }

  // Confidence of N at least beta; hyper-network confidence at most zero.
  p.beta = model.add_variable("beta", -kInf, kInf);
  const auto& out_hyper = hyper_bounds.layers.back();
  double spread = 0.0;
  for (std::size_t o = 0; o < arch.output_size(); ++o) {
    if (o != c) spread = std::max(spread, out_hyper[c].hi - out_hyper[o].lo);
  }
  p.big_m = spread + options.big_m_margin;
  std::vector<Term> pick;
  for (std::size_t o = 0; o < arch.output_size(); ++o) {
    if (o == c) continue;
    const std::string suffix = std::to_string(o);
    model.add_ge("conf_" + suffix, {{p.net_outputs[c], 1.0}, {p.net_outputs[o], -1.0}, {p.beta, -1.0}}, 0.0);
    const auto alpha = model.add_binary("alpha_" + suffix);
    ++p.stats.class_binaries;
    // z#_c - z#_o <= M (1 - alpha)
    model.add_le("hconf_" + suffix,
                 {{p.hyper_outputs[c], 1.0}, {p.hyper_outputs[o], -1.0}, {alpha, p.big_m}}, p.big_m);
    pick.push_back({alpha, 1.0});
  }
  model.add_ge("pick", std::move(pick), 1.0);
  model.set_objective({{p.beta, 1.0}});
  return p;
}

BoundOutcome solve_bound(const BoundProblem& problem, SolverBackend& backend, const SolveLimits& limits) {
  const SolveResult r = backend.solve(problem.model, limits);
  BoundOutcome out;
  out.status = r.status;
  out.seconds = r.solve_seconds;
  switch (r.status) {
    case SolveStatus::Optimal:
      out.beta = Beta(*r.incumbent);
      break;
    case SolveStatus::Infeasible:
      out.beta = Beta::no_leaking_inputs();
      break;
    case SolveStatus::TimeLimit:
      out.beta = Beta(r.dual_bound);
      out.exact = false;
      break;
  }
  if (!r.solution.empty()) {
    Vector x;
    for (const auto v : problem.inputs) x.push_back(r.solution[v]);
    out.witness = std::move(x);
  }
  return out;
}

BoundOutcome bound_for_members(const Network& net, std::span<const Network* const> members,
                               std::size_t c, const EncodeOptions& options, SolverBackend& backend,
                               const SolveLimits& limits) {
  const IntervalNetwork hyper = build_hyper(members);
  const PreActivationBounds net_bounds = propagate_bounds(net);
  const PreActivationBounds hyper_bounds = propagate_bounds(hyper);
  const DifferenceIntervals diffs = compute_difference_intervals(net, hyper, net_bounds);
  const BoundProblem problem = encode(net, hyper, c, net_bounds, hyper_bounds, diffs, options);
  return solve_bound(problem, backend, limits);
}

Beta exact_oracle(const Network& net, const IntervalNetwork& hyper, std::size_t c,
                  SolverBackend& backend, const SolveLimits& limits) {
  const Architecture& arch = net.architecture();
  if (!(hyper.architecture() == arch)) throw DimensionMismatch("network and hyper-network architectures differ");
  if (c >= arch.output_size()) throw InvalidArgument("class out of range");
  const std::size_t hidden = arch.hidden_neurons();
  if (2 * hidden > 16) {
    throw InvalidArgument("exact oracle supports at most 16 ReLUs across both copies, got " +
                          std::to_string(2 * hidden));
  }
  const std::size_t L = arch.num_layers();
  const std::uint32_t patterns = 1u << (2 * hidden);

  Beta best = Beta::no_leaking_inputs();
  for (std::uint32_t pattern = 0; pattern < patterns; ++pattern) {
    for (std::size_t rival = 0; rival < arch.output_size(); ++rival) {
      if (rival == c) continue;
      MilpModel lp;
      std::vector<std::size_t> x;
      for (std::size_t k = 0; k < arch.input_size(); ++k) x.push_back(lp.add_variable("x" + std::to_string(k), 0.0, 1.0));
      std::size_t bit = 0;
      // Network copy.
      std::vector<std::size_t> prev = x;
      for (std::size_t m = 0; m < L; ++m) {
        const auto& layer = net.layer(m);
        std::vector<std::size_t> cur;
        for (std::size_t k = 0; k < layer.bias.size(); ++k) {
          const auto s = lp.add_variable("s", -kInf, kInf);
          std::vector<Term> t{{s, 1.0}};
          for (std::size_t j = 0; j < prev.size(); ++j) t.push_back({prev[j], -layer.weights(k, j)});
          lp.add_eq("sum", std::move(t), layer.bias[k]);
          if (m + 1 == L) {
            cur.push_back(s);
            continue;
          }
          const bool active = (pattern >> bit++) & 1u;
          if (active) {
            lp.add_ge("act", {{s, 1.0}}, 0.0);
            cur.push_back(s);
          } else {
            lp.add_le("inact", {{s, 1.0}}, 0.0);
            cur.push_back(lp.add_variable("zero", 0.0, 0.0));
          }
        }
        prev = std::move(cur);
      }
      const std::vector<std::size_t> net_out = prev;
      // Hyper copy.
      prev = x;
      for (std::size_t m = 0; m < L; ++m) {
        const auto& layer = hyper.layer(m);
        std::vector<std::size_t> cur;
        for (std::size_t k = 0; k < layer.rows; ++k) {
          const auto s = lp.add_variable("h", -kInf, kInf);
          std::vector<Term> lo{{s, 1.0}};
          std::vector<Term> hi{{s, 1.0}};
          for (std::size_t j = 0; j < prev.size(); ++j) {
            lo.push_back({prev[j], -layer.weight(k, j).lo});
            hi.push_back({prev[j], -layer.weight(k, j).hi});
          }
          lp.add_ge("hlo", std::move(lo), layer.bias[k].lo);
          lp.add_le("hhi", std::move(hi), layer.bias[k].hi);
          if (m + 1 == L) {
            cur.push_back(s);
            continue;
          }
          const bool active = (pattern >> bit++) & 1u;
          if (active) {
            lp.add_ge("act", {{s, 1.0}}, 0.0);
            cur.push_back(s);
          } else {
            lp.add_le("inact", {{s, 1.0}}, 0.0);
            cur.push_back(lp.add_variable("zero", 0.0, 0.0));
          }
        }
        prev = std::move(cur);
      }
      const std::vector<std::size_t> hyper_out = prev;
      const auto beta = lp.add_variable("beta", -kInf, kInf);
      for (std::size_t o = 0; o < arch.output_size(); ++o) {
        if (o != c) lp.add_ge("conf", {{net_out[c], 1.0}, {net_out[o], -1.0}, {beta, -1.0}}, 0.0);
      }
      lp.add_le("hconf", {{hyper_out[c], 1.0}, {hyper_out[rival], -1.0}}, 0.0);
      lp.set_objective({{beta, 1.0}});
      const SolveResult r = backend.solve(lp, limits);
      if (r.status == SolveStatus::Optimal) best = std::max(best, Beta(*r.incumbent));
      if (r.status == SolveStatus::TimeLimit) throw SolverFailure("oracle LP hit its time limit");
    }
  }
  return best;
}

}  // namespace idpdb
