#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ldbm/covariance.hpp"
#include "ldbm/grid.hpp"
#include "ldbm/rng.hpp"

namespace ldbm {

enum class SamplerMethod { automatic, cholesky, circulant };

struct SamplerOptions {
  SamplerMethod method = SamplerMethod::automatic;
  /// `automatic` factorizes densely up to this many nodes (64 x 64) and embeds above it.
  std::size_t dense_node_limit = 4096;
  double initial_jitter = 1e-12;
  double max_jitter = 1e-8;
  /// Circulant embedding pads each axis by 2, 4, ... up to this factor.
  int max_padding = 8;
  /// Eigenvalues of the embedding above -tolerance * max eigenvalue are treated as rounding and clipped to 0.
  double embedding_tolerance = 1e-12;
};

/// One draw of the layer field Y_n on a grid.
struct LayerSample {
  int layer = 0;
  GridSpec grid = GridSpec::default_grid();
  std::vector<double> values;
  StreamKey stream;
  double cutoff_lower = 1.0;  // c_{n-1}
  double cutoff_upper = 1.0;  // c_n
};

/// X_n = Y_1 + ... + Y_n on a grid with E[X_n(z)^2] = log c_n.
struct FieldState {
  int level = 0;
  GridSpec grid = GridSpec::default_grid();
  std::vector<double> values;
  double variance = 0.0;
  /// Layer k of this realization was drawn from StreamKey{seed, streams::field_layer(k), draw}.
  std::uint64_t seed = 0;
  std::uint32_t draw = 0;
};

/// Level-0 field (identically zero, variance log c_0 = 0).
FieldState zero_field(const GridSpec& grid, std::uint64_t seed, std::uint32_t draw);

/// X_n = X_{n-1} + Y_n node-wise; the variance becomes log c_n.
FieldState accumulate_field(const FieldState& state, const LayerSample& layer);

/// E[X_n(z)^2] = log c_n for n >= 0.
double field_variance(int n, const CutoffSequence& seq);

/// Exact-in-distribution sampler for one layer on one grid.
///
/// Dense mode factorizes the full covariance matrix (Cholesky with escalating
/// diagonal jitter); circulant mode embeds the stationary covariance on a
/// padded torus and diagonalizes it by FFT. The factorization is built once and
/// shared by every draw.
class LayerSampler {
 public:
  LayerSampler(const GridSpec& grid, int layer, const CutoffSequence& seq, MassParam m, const SamplerOptions& options = {});
  ~LayerSampler();
  LayerSampler(LayerSampler&&) noexcept;
  LayerSampler& operator=(LayerSampler&&) noexcept;

  LayerSample sample(std::uint64_t seed, std::uint32_t draw) const;
  /// Draws first_draw, ..., first_draw + count - 1; each equals sample(seed, draw) bit for bit.
  std::vector<LayerSample> sample_batch(std::uint64_t seed, std::uint32_t first_draw, std::size_t count) const;

  int layer() const { return layer_; }
  const GridSpec& grid() const { return grid_; }
  /// Prescribed covariance at lag r (the tabulated layer covariance).
  double covariance(double r) const { return table_(r); }
  double zero_lag() const { return table_.zero_lag(); }
  bool trivial() const { return table_.zero_lag() == 0.0; }
  SamplerMethod method() const { return method_; }
  /// Diagonal jitter that made the dense factorization succeed (0 in circulant mode).
  double jitter() const { return jitter_; }
  /// Per-axis padding factor of the circulant embedding (0 in dense mode).
  int padding() const { return padding_; }

  /// Columns drawn per dense product; single draws are padded to this width.
  static constexpr std::size_t kBatchWidth = 32;

 private:
  struct Circulant;

  void factorize_dense(const SamplerOptions& options);
  bool try_circulant(const SamplerOptions& options);
  LayerSample blank(std::uint64_t seed, std::uint32_t draw) const;
  void fill_dense_block(std::uint64_t seed, std::uint32_t first_draw, std::size_t count,
                        std::vector<LayerSample>& out) const;
  void fill_circulant(LayerSample& sample) const;

  GridSpec grid_;
  int layer_;
  double cutoff_lower_;
  double cutoff_upper_;
  CovarianceTable table_;
  SamplerMethod method_ = SamplerMethod::cholesky;
  double jitter_ = 0.0;
  int padding_ = 0;
  Eigen::MatrixXd factor_;
  std::unique_ptr<Circulant> circulant_;
};

/// Draws nested fields X_0, ..., X_n from one master seed, caching one
/// LayerSampler per layer.
class FieldSampler {
 public:
  FieldSampler(GridSpec grid, CutoffSequence seq, MassParam m, SamplerOptions options = {});

  const GridSpec& grid() const { return grid_; }
  const CutoffSequence& sequence() const { return seq_; }
  MassParam mass() const { return m_; }

  const LayerSampler& layer_sampler(int layer) const;

  FieldState sample(int level, std::uint64_t seed, std::uint32_t draw) const;
  /// X_0, ..., X_level of one realization.
  std::vector<FieldState> sample_levels(int level, std::uint64_t seed, std::uint32_t draw) const;
  /// Top-level fields of draws first_draw .. first_draw + count - 1.
  std::vector<FieldState> sample_ensemble(int level, std::uint64_t seed, std::uint32_t first_draw,
                                          std::size_t count) const;
  /// Calls visit(levels) with X_0..X_level for each ensemble member, in draw order.
  void visit_ensemble(int level, std::uint64_t seed, std::uint32_t first_draw, std::size_t count,
                      const std::function<void(std::span<const FieldState>)>& visit) const;

 private:
  GridSpec grid_;
  CutoffSequence seq_;
  MassParam m_;
  SamplerOptions options_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<LayerSampler>> samplers_;
};

}  // namespace ldbm
