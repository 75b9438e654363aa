#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

namespace idpdb {

using Vector = std::vector<double>;

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Layer sizes [d, k_1, ..., k_L]. The last entry is the number of classes.
struct Architecture {
  std::vector<std::size_t> layer_sizes;

  /// Throws InvalidArgument unless every size is positive and there is at
  /// least one hidden layer.
  void validate() const;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  /// Number of affine layers L.
  std::size_t num_layers() const { return layer_sizes.size() - 1; }
  /// Neurons in layers 1..L-1 (the ones followed by a ReLU).
  std::size_t hidden_neurons() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct Layer {
  Matrix weights;  // k_m x k_{m-1}
  Vector bias;     // k_m

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Fully-connected ReLU classifier. Hidden layers apply ReLU; the output
/// layer is affine only.
class Network {
 public:
  Network() = default;
  Network(Architecture arch, std::vector<Layer> layers);

  /// Zero-initialized network of the given architecture.
  static Network zeros(const Architecture& arch);

  const Architecture& architecture() const { return arch_; }
  std::size_t num_layers() const { return layers_.size(); }
  const Layer& layer(std::size_t m) const { return layers_[m]; }
  Layer& layer(std::size_t m) { return layers_[m]; }
  std::span<const Layer> layers() const { return layers_; }

  /// Output scores N(x).
  Vector forward(std::span<const double> x) const;

  /// Post-activation values of every layer, element 0 being x itself and the
  /// last element the output scores.
  std::vector<Vector> activations(std::span<const double> x) const;

  std::size_t parameter_count() const;
  /// Weights then biases, layer by layer.
  Vector flatten() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  void check_input(std::span<const double> x) const;

  Architecture arch_;
  std::vector<Layer> layers_;
};

/// Index of the maximal score, lowest index on ties.
std::size_t argmax(std::span<const double> scores);

/// scores[c] - max_{c' != c} scores[c'].
double confidence(std::span<const double> scores, std::size_t c);

double confidence(const Network& net, std::span<const double> x, std::size_t c);
std::size_t predict(const Network& net, std::span<const double> x);

nlohmann::json to_json(const Network& net);
Network network_from_json(const nlohmann::json& doc);

void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

}  // namespace idpdb
