#include "idpdb/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "idpdb/errors.hpp"
#include "idpdb/rng.hpp"

namespace idpdb {

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("epochs must be at least 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning_rate must be finite and non-negative");
  }
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"learning_rate", cfg.learning_rate},
          {"seed", cfg.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& doc) {
  TrainConfig cfg;
  cfg.epochs = doc.at("epochs").get<std::size_t>();
  cfg.batch_size = doc.at("batch_size").get<std::size_t>();
  cfg.learning_rate = doc.at("learning_rate").get<double>();
  cfg.seed = doc.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

Network initialize_network(const Architecture& arch, std::uint64_t seed) {
  Network net = Network::zeros(arch);
  auto rng = CounterRng::substream(seed, "init");
  for (std::size_t m = 0; m < net.num_layers(); ++m) {
    auto& l = net.layer(m);
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.weights.cols()));
    for (double& w : l.weights.data()) w = rng.uniform(-bound, bound);
    for (double& b : l.bias) b = rng.uniform(-bound, bound);
  }
  return net;
}

namespace {

// Softmax cross-entropy of one point; writes dLoss/dScores into grad.
double point_loss(const Vector& scores, std::size_t label, Vector* grad) {
  const double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - mx);
  const double log_z = mx + std::log(sum);
  if (grad) {
    grad->resize(scores.size());
    for (std::size_t c = 0; c < scores.size(); ++c) {
      (*grad)[c] = std::exp(scores[c] - log_z) - (c == label ? 1.0 : 0.0);
    }
  }
  return log_z - scores[label];
}

std::vector<Layer> zero_like(const Network& net) {
  std::vector<Layer> g;
  for (const auto& l : net.layers()) {
    g.push_back(Layer{Matrix(l.weights.rows(), l.weights.cols()), Vector(l.bias.size(), 0.0)});
  }
  return g;
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t shuffle_key, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(mix64(shuffle_key + 0x632be59bd9b4e019ULL * (epoch + 1)));
  shuffle(std::span<std::size_t>(order), rng);
  return order;
}

Network run_sgd(const Dataset& data, const std::size_t* omitted, const Architecture& arch,
                const TrainConfig& cfg) {
  cfg.validate();
  arch.validate();
  if (arch.input_size() != data.dim() || arch.output_size() != data.num_classes()) {
    throw DimensionMismatch("architecture [" + std::to_string(arch.input_size()) + " ... " +
                            std::to_string(arch.output_size()) + "] does not match dataset (d=" +
                            std::to_string(data.dim()) + ", classes=" +
                            std::to_string(data.num_classes()) + ")");
  }
  const std::size_t remaining = data.size() - (omitted ? 1 : 0);
  if (data.empty() || remaining == 0) {
    throw InvalidArgument("cannot train on an empty dataset");
  }

  Network net = initialize_network(arch, cfg.seed);
  const std::uint64_t shuffle_key = CounterRng::substream(cfg.seed, "shuffle").key();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto order = epoch_order(data.size(), shuffle_key, epoch);
    if (omitted) order.erase(std::find(order.begin(), order.end(), *omitted));
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      double loss = 0.0;
      const auto grad = batch_gradient(net, data, batch, &loss);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_index));
      }
      for (std::size_t m = 0; m < net.num_layers(); ++m) {
        auto& l = net.layer(m);
        auto w = l.weights.data();
        const auto gw = grad[m].weights.data();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.learning_rate * gw[i];
        for (std::size_t i = 0; i < l.bias.size(); ++i) l.bias[i] -= cfg.learning_rate * grad[m].bias[i];
      }
    }
  }
  return net;
}

}  // namespace

double batch_loss(const Network& net, const Dataset& data, std::span<const std::size_t> batch) {
  double total = 0.0;
  for (std::size_t i : batch) total += point_loss(net.forward(data[i].features), data[i].label, nullptr);
  return total / static_cast<double>(batch.size());
}

std::vector<Layer> batch_gradient(const Network& net, const Dataset& data,
                                  std::span<const std::size_t> batch, double* loss) {
  auto grad = zero_like(net);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  Vector delta;
  Vector prev_delta;
  for (std::size_t i : batch) {
    const auto acts = net.activations(data[i].features);
    total += point_loss(acts.back(), data[i].label, &delta);
    for (double& v : delta) v *= scale;
    for (std::size_t m = net.num_layers(); m-- > 0;) {
      const auto& l = net.layer(m);
      const Vector& input = acts[m];
      auto& g = grad[m];
      for (std::size_t k = 0; k < delta.size(); ++k) {
        g.bias[k] += delta[k];
        for (std::size_t j = 0; j < input.size(); ++j) g.weights(k, j) += delta[k] * input[j];
      }
      if (m == 0) break;
      prev_delta.assign(input.size(), 0.0);
      for (std::size_t k = 0; k < delta.size(); ++k) {
        for (std::size_t j = 0; j < input.size(); ++j) prev_delta[j] += l.weights(k, j) * delta[k];
      }
      // input = ReLU(pre-activation); a positive output marks an active unit.
      for (std::size_t j = 0; j < input.size(); ++j) {
        if (!(input[j] > 0.0)) prev_delta[j] = 0.0;
      }
      delta.swap(prev_delta);
    }
  }
  if (loss) *loss = total * scale;
  return grad;
}

double accuracy(const Network& net, const Dataset& data) {
  if (data.empty()) throw InvalidArgument("accuracy of an empty dataset");
  std::size_t correct = 0;
  for (const auto& p : data.points()) correct += predict(net, p.features) == p.label;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

Network train(const Dataset& data, const Architecture& arch, const TrainConfig& cfg) {
  return run_sgd(data, nullptr, arch, cfg);
}

Network train_excluding(const Dataset& data, std::size_t omitted, const Architecture& arch,
                        const TrainConfig& cfg) {
  if (omitted >= data.size()) {
    throw InvalidArgument("omitted index " + std::to_string(omitted) + " out of range");
  }
  return run_sgd(data, &omitted, arch, cfg);
}

std::vector<std::size_t> LooFamily::indices() const {
  std::vector<std::size_t> out;
  out.reserve(omitted.size());
  for (const auto& [i, _] : omitted) out.push_back(i);
  return out;
}

const Network& LooFamily::member(std::size_t index) const {
  const auto it = omitted.find(index);
  if (it == omitted.end()) {
    throw InvalidArgument("no leave-one-out network for index " + std::to_string(index));
  }
  return it->second;
}

LooFamily train_loo_family(const Dataset& data, const Architecture& arch, const TrainConfig& cfg,
                           std::size_t workers) {
  if (data.size() < 2) {
    throw InvalidArgument("leave-one-out family needs at least two points; omitting the only point leaves an empty training set");
  }
  LooFamily family;
  family.full = train(data, arch, cfg);
  std::vector<Network> members(data.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < data.size(); i = next++) {
      members[i] = train_excluding(data, i, arch, cfg);
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, data.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        try {
          work();
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = data.size();
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }
  for (std::size_t i = 0; i < data.size(); ++i) family.omitted.emplace(i, std::move(members[i]));
  return family;
}

void save_family(const LooFamily& family, const FamilyManifest& manifest,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "omitted");
  save_network(family.full, dir / "full.json");
  for (const auto& [i, net] : family.omitted) {
    save_network(net, dir / "omitted" / (std::to_string(i) + ".json"));
  }
  nlohmann::json doc = {{"architecture", manifest.architecture.layer_sizes},
                        {"train", to_json(manifest.config)},
                        {"dataset_hash", manifest.dataset_hash},
                        {"dataset_size", manifest.dataset_size},
                        {"members", family.indices()}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << doc.dump(2) << '\n';
}

LooFamily load_family(const std::filesystem::path& dir, FamilyManifest* manifest) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("missing family manifest " + manifest_path.string() + " (run `train` first)");
  nlohmann::json doc;
  try {
    in >> doc;
    LooFamily family;
    family.full = load_network(dir / "full.json");
    for (const auto i : doc.at("members").get<std::vector<std::size_t>>()) {
      family.omitted.emplace(i, load_network(dir / "omitted" / (std::to_string(i) + ".json")));
    }
    if (manifest) {
      manifest->architecture = Architecture{doc.at("architecture").get<std::vector<std::size_t>>()};
      manifest->config = train_config_from_json(doc.at("train"));
      manifest->dataset_hash = doc.at("dataset_hash").get<std::uint64_t>();
      manifest->dataset_size = doc.at("dataset_size").get<std::size_t>();
    }
    return family;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest_path.string() + ": " + e.what());
  }
}

}  // namespace idpdb
