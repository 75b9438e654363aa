#include "idpdb/bab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace idpdb {

namespace {

using Clock = std::chrono::steady_clock;

// Max-priority order: larger bound first; on ties prefer smaller subsets
// (a singleton terminates the search), then the smaller leading index,
// then insertion order.
bool pops_before(const QueuedTask& a, std::size_t seq_a, const QueuedTask& b, std::size_t seq_b) {
  if (a.bound != b.bound) return a.bound > b.bound;
  if (a.subset.size() != b.subset.size()) return a.subset.size() < b.subset.size();
  if (a.subset.front() != b.subset.front()) return a.subset.front() < b.subset.front();
  return seq_a < seq_b;
}

class TaskQueue {
 public:
  void push(QueuedTask t) { items_.push_back({std::move(t), seq_++}); }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  QueuedTask pop() {
    std::size_t best = 0;
    for (std::size_t i = 1; i < items_.size(); ++i) {
      if (pops_before(items_[i].first, items_[i].second, items_[best].first, items_[best].second)) best = i;
    }
    QueuedTask t = std::move(items_[best].first);
    items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(best));
    return t;
  }

  std::vector<QueuedTask> drain() {
    std::vector<QueuedTask> out;
    while (!empty()) out.push_back(pop());
    return out;
  }

 private:
  std::vector<std::pair<QueuedTask, std::size_t>> items_;
  std::size_t seq_ = 0;
};

}  // namespace

BoundResult branch_and_bound(std::span<const std::size_t> indices,
                             const std::map<std::size_t, Vector>& params,
                             const AnalyzerFactory& make_analyzer, const BabConfig& config) {
  if (indices.empty()) throw InvalidArgument("branch-and-bound needs at least one index");
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  BoundResult result;
  result.beta = Beta(kInf);
  result.exact = false;
  TaskQueue queue;
  std::vector<std::vector<std::size_t>> pending{std::vector<std::size_t>(indices.begin(), indices.end())};
  std::sort(pending.front().begin(), pending.front().end());

  const std::size_t workers = std::max<std::size_t>(1, config.workers);
  std::vector<std::unique_ptr<SubsetAnalyzer>> analyzers(workers);
  std::mutex push_mutex;

  while (true) {
    // Analyze every pending subset.
    std::vector<SubsetBound> bounds(pending.size());
    std::vector<std::exception_ptr> failures(pending.size());
    std::atomic<std::size_t> next{0};
    auto work = [&](std::size_t worker) {
      for (std::size_t i = next++; i < pending.size(); i = next++) {
        try {
          if (!analyzers[worker]) analyzers[worker] = make_analyzer();
          bounds[i] = analyzers[worker]->analyze(pending[i]);
          if (!config.deterministic) {
            std::lock_guard lock(push_mutex);
            queue.push({pending[i], bounds[i].bound, bounds[i].exact});
            result.trace.push_back({TraceKind::Solve, pending[i], bounds[i].bound, bounds[i].status,
                                    bounds[i].exact, bounds[i].seconds});
          }
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    };
    const std::size_t active = std::min(workers, pending.size());
    if (active == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < active; ++w) pool.emplace_back(work, w);
    }
    result.milp_count += pending.size();
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (failures[i]) {
        std::string what = "subset analysis failed";
        try {
          std::rethrow_exception(failures[i]);
        } catch (const std::exception& e) {
          what += std::string(": ") + e.what();
        } catch (...) {
        }
        result.remaining = queue.drain();
        throw BabAborted(what, std::move(result));
      }
      if (config.deterministic) {
        queue.push({pending[i], bounds[i].bound, bounds[i].exact});
        result.trace.push_back({TraceKind::Solve, pending[i], bounds[i].bound, bounds[i].status,
                                bounds[i].exact, bounds[i].seconds});
      }
    }

    QueuedTask top = queue.pop();
    result.beta = top.bound;
    result.trace.push_back({TraceKind::Pop, top.subset, top.bound, SolveStatus::Optimal, top.exact, elapsed()});
    if (config.on_pop) config.on_pop(result.trace.back(), queue.size());

    // A NoLeakingInputs pop means every queued task is NoLeakingInputs.
    if (top.bound.is_no_leaking_inputs() || top.subset.size() == 1) {
      result.exact = top.exact;
      break;
    }
    if (elapsed() >= config.total_time_limit_seconds) {
      result.timed_out = true;
      result.exact = false;
      queue.push(std::move(top));
      break;
    }

    std::vector<Vector> vecs;
    for (std::size_t i : top.subset) vecs.push_back(params.at(i));
    pending = partition(top.subset, vecs, config.cluster);
  }
  result.remaining = queue.drain();
  return result;
}

MilpSubsetAnalyzer::MilpSubsetAnalyzer(const LooFamily& family, std::size_t c, EncodeOptions encode,
                                       SolveLimits limits, std::unique_ptr<SolverBackend> backend)
    : family_(family), class_(c), encode_(encode), limits_(limits), backend_(std::move(backend)) {}

SubsetBound MilpSubsetAnalyzer::analyze(std::span<const std::size_t> subset) {
  std::vector<const Network*> members;
  members.reserve(subset.size());
  for (std::size_t i : subset) members.push_back(&family_.member(i));
  const BoundOutcome o = bound_for_members(family_.full, members, class_, encode_, *backend_, limits_);
  return {o.beta, o.status, o.exact, o.seconds};
}

BoundResult compute_bound(const LooFamily& family, std::size_t c, const BoundOptions& options) {
  if (c >= family.full.architecture().output_size()) {
    throw InvalidArgument("class " + std::to_string(c) + " out of range");
  }
  std::map<std::size_t, Vector> params;
  for (const auto& [i, net] : family.omitted) params.emplace(i, net.flatten());
  const auto indices = family.indices();
  make_backend(options.backend);  // fail fast on an unknown name
  AnalyzerFactory factory = [&] {
    return std::make_unique<MilpSubsetAnalyzer>(family, c, options.encode, options.limits,
                                                make_backend(options.backend));
  };
  return branch_and_bound(indices, params, factory, options.bab);
}

NaiveBound naive_bound(const LooFamily& family, std::size_t c, const BoundOptions& options) {
  NaiveBound out;
  out.beta = Beta::no_leaking_inputs();
  MilpSubsetAnalyzer analyzer(family, c, options.encode, options.limits, make_backend(options.backend));
  for (const auto& [i, _] : family.omitted) {
    const std::size_t one[] = {i};
    const SubsetBound b = analyzer.analyze(one);
    out.beta = std::max(out.beta, b.bound);
    out.per_point.emplace(i, b);
  }
  return out;
}

namespace {

std::string_view kind_name(TraceKind k) { return k == TraceKind::Solve ? "solve" : "pop"; }

nlohmann::json beta_or_inf(const Beta& b) {
  if (b.has_value() && !std::isfinite(b.value())) return b.value() > 0 ? "inf" : "-inf";
  return to_json(b);
}

Beta beta_or_inf_from(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return Beta(kInf);
  if (j.is_string() && j.get<std::string>() == "-inf") return Beta(-kInf);
  return beta_from_json(j);
}

}  // namespace

nlohmann::json to_json(const BoundResult& result, bool include_timing) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& e : result.trace) {
    nlohmann::json j = {{"event", kind_name(e.kind)},
                        {"size", e.subset.size()},
                        {"subset", e.subset},
                        {"bound", beta_or_inf(e.bound)},
                        {"exact", e.exact}};
    if (e.kind == TraceKind::Solve) j["status"] = to_string(e.status);
    if (include_timing) j["seconds"] = e.seconds;
    trace.push_back(std::move(j));
  }
  nlohmann::json remaining = nlohmann::json::array();
  for (const auto& t : result.remaining) {
    remaining.push_back({{"subset", t.subset}, {"bound", beta_or_inf(t.bound)}, {"exact", t.exact}});
  }
  return {{"beta", beta_or_inf(result.beta)},
          {"exact", result.exact},
          {"timed_out", result.timed_out},
          {"milp_count", result.milp_count},
          {"trace", std::move(trace)},
          {"remaining", std::move(remaining)}};
}

BoundResult bound_result_from_json(const nlohmann::json& doc) {
  try {
    BoundResult r;
    r.beta = beta_or_inf_from(doc.at("beta"));
    r.exact = doc.at("exact").get<bool>();
    r.timed_out = doc.value("timed_out", false);
    r.milp_count = doc.value("milp_count", std::size_t{0});
    for (const auto& j : doc.value("trace", nlohmann::json::array())) {
      TraceEvent e;
      e.kind = j.at("event").get<std::string>() == "solve" ? TraceKind::Solve : TraceKind::Pop;
      e.subset = j.at("subset").get<std::vector<std::size_t>>();
      e.bound = beta_or_inf_from(j.at("bound"));
      e.exact = j.at("exact").get<bool>();
      if (j.contains("status")) e.status = solve_status_from_string(j.at("status").get<std::string>());
      e.seconds = j.value("seconds", 0.0);
      r.trace.push_back(std::move(e));
    }
    for (const auto& j : doc.value("remaining", nlohmann::json::array())) {
      r.remaining.push_back({j.at("subset").get<std::vector<std::size_t>>(), beta_or_inf_from(j.at("bound")),
                             j.at("exact").get<bool>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed bound result: ") + e.what());
  }
}

}  // namespace idpdb
