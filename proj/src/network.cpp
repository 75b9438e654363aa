#include "idpdb/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "idpdb/errors.hpp"

namespace idpdb {

void Architecture::validate() const {
  if (layer_sizes.size() < 3) {
    throw InvalidArgument("architecture needs an input, at least one hidden layer and an output layer");
  }
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (layer_sizes[i] == 0) {
      throw InvalidArgument("architecture layer " + std::to_string(i) + " has size 0");
    }
  }
}

std::size_t Architecture::hidden_neurons() const {
  std::size_t n = 0;
  for (std::size_t m = 1; m + 1 < layer_sizes.size(); ++m) n += layer_sizes[m];
  return n;
}

Network::Network(Architecture arch, std::vector<Layer> layers)
    : arch_(std::move(arch)), layers_(std::move(layers)) {
  arch_.validate();
  if (layers_.size() != arch_.num_layers()) {
    throw DimensionMismatch("network has " + std::to_string(layers_.size()) +
                            " layers, architecture expects " +
                            std::to_string(arch_.num_layers()));
  }
  for (std::size_t m = 0; m < layers_.size(); ++m) {
    const auto rows = arch_.layer_sizes[m + 1];
    const auto cols = arch_.layer_sizes[m];
    const auto& l = layers_[m];
    if (l.weights.rows() != rows || l.weights.cols() != cols || l.bias.size() != rows) {
      std::ostringstream os;
      os << "layer " << (m + 1) << ": expected weights " << rows << "x" << cols
         << " and bias " << rows << ", got " << l.weights.rows() << "x"
         << l.weights.cols() << " and " << l.bias.size();
      throw DimensionMismatch(os.str());
    }
    const bool finite =
        std::all_of(l.weights.data().begin(), l.weights.data().end(),
                    [](double v) { return std::isfinite(v); }) &&
        std::all_of(l.bias.begin(), l.bias.end(), [](double v) { return std::isfinite(v); });
    if (!finite) {
      throw InvalidArgument("layer " + std::to_string(m + 1) + " has non-finite parameters");
    }
  }
}

Network Network::zeros(const Architecture& arch) {
  arch.validate();
  std::vector<Layer> layers;
  for (std::size_t m = 0; m < arch.num_layers(); ++m) {
    layers.push_back(Layer{Matrix(arch.layer_sizes[m + 1], arch.layer_sizes[m]),
                           Vector(arch.layer_sizes[m + 1], 0.0)});
  }
  return Network(arch, std::move(layers));
}

void Network::check_input(std::span<const double> x) const {
  if (x.size() != arch_.input_size()) {
    throw DimensionMismatch("layer 0 (input): expected size " +
                            std::to_string(arch_.input_size()) + ", got " +
                            std::to_string(x.size()));
  }
}

std::vector<Vector> Network::activations(std::span<const double> x) const {
  check_input(x);
  std::vector<Vector> out;
  out.reserve(layers_.size() + 1);
  out.emplace_back(x.begin(), x.end());
  for (std::size_t m = 0; m < layers_.size(); ++m) {
    const auto& l = layers_[m];
    const Vector& prev = out.back();
    Vector next(l.weights.rows());
    for (std::size_t k = 0; k < next.size(); ++k) {
      double s = l.bias[k];
      const auto row = l.weights.row(k);
      for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * prev[j];
      next[k] = (m + 1 < layers_.size()) ? std::max(0.0, s) : s;
    }
    out.push_back(std::move(next));
  }
  return out;
}

Vector Network::forward(std::span<const double> x) const {
  check_input(x);
  Vector cur(x.begin(), x.end());
  Vector next;
  for (std::size_t m = 0; m < layers_.size(); ++m) {
    const auto& l = layers_[m];
    next.assign(l.weights.rows(), 0.0);
    for (std::size_t k = 0; k < next.size(); ++k) {
      double s = l.bias[k];
      const auto row = l.weights.row(k);
      for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * cur[j];
      next[k] = (m + 1 < layers_.size()) ? std::max(0.0, s) : s;
    }
    cur.swap(next);
  }
  return cur;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.data().size() + l.bias.size();
  return n;
}

Vector Network::flatten() const {
  Vector v;
  v.reserve(parameter_count());
  for (const auto& l : layers_) {
    v.insert(v.end(), l.weights.data().begin(), l.weights.data().end());
    v.insert(v.end(), l.bias.begin(), l.bias.end());
  }
  return v;
}

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

double confidence(std::span<const double> scores, std::size_t c) {
  if (c >= scores.size()) {
    throw InvalidArgument("class " + std::to_string(c) + " out of range for " +
                          std::to_string(scores.size()) + " scores");
  }
  double other = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i != c) other = std::max(other, scores[i]);
  }
  return scores[c] - other;
}

double confidence(const Network& net, std::span<const double> x, std::size_t c) {
  return confidence(net.forward(x), c);
}

std::size_t predict(const Network& net, std::span<const double> x) {
  return argmax(net.forward(x));
}

nlohmann::json to_json(const Network& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers()) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < l.weights.rows(); ++r) {
      const auto row = l.weights.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    layers.push_back({{"weights", std::move(rows)}, {"bias", l.bias}});
  }
  return {{"architecture", net.architecture().layer_sizes}, {"layers", std::move(layers)}};
}

Network network_from_json(const nlohmann::json& doc) {
  try {
    Architecture arch{doc.at("architecture").get<std::vector<std::size_t>>()};
    arch.validate();
    const auto& jl = doc.at("layers");
    std::vector<Layer> layers;
    for (std::size_t m = 0; m < jl.size(); ++m) {
      const auto rows = jl[m].at("weights").get<std::vector<std::vector<double>>>();
      const std::size_t cols = rows.empty() ? 0 : rows.front().size();
      Matrix w(rows.size(), cols);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
          throw DimensionMismatch("layer " + std::to_string(m + 1) + ": ragged weight rows");
        }
        for (std::size_t c = 0; c < cols; ++c) w(r, c) = rows[r][c];
      }
      layers.push_back(Layer{std::move(w), jl[m].at("bias").get<Vector>()});
    }
    return Network(std::move(arch), std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed network document: ") + e.what());
  }
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(net).dump(1) << '\n';
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read network " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return network_from_json(doc);
}

}  // namespace idpdb
