#include "ldbm/gff.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <fftw3.h>

#include "ldbm/error.hpp"

namespace ldbm {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

std::vector<double> lag_covariances(const GridSpec& grid, const CovarianceTable& table, int lags_x, int lags_y) {
  std::vector<double> lag(static_cast<std::size_t>(lags_x) * static_cast<std::size_t>(lags_y));
  const double hx = grid.cell_width_x();
  const double hy = grid.cell_width_y();
  for (int dj = 0; dj < lags_y; ++dj)
    for (int di = 0; di < lags_x; ++di)
      lag[static_cast<std::size_t>(dj) * lags_x + di] = table(std::hypot(di * hx, dj * hy));
  return lag;
}

}  // namespace

struct LayerSampler::Circulant {
  int mx = 0;
  int my = 0;
  std::vector<double> amplitude;  // sqrt(lambda_k / (mx * my))
  fftw_plan plan = nullptr;

  ~Circulant() {
    if (plan) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

FieldState zero_field(const GridSpec& grid, std::uint64_t seed, std::uint32_t draw) {
  FieldState state;
  state.level = 0;
  state.grid = grid;
  state.values.assign(grid.node_count(), 0.0);
  state.variance = 0.0;
  state.seed = seed;
  state.draw = draw;
  return state;
}

FieldState accumulate_field(const FieldState& state, const LayerSample& layer) {
  if (!(state.grid == layer.grid)) throw ContractError("accumulate_field: layer grid differs from field grid");
  if (layer.layer != state.level + 1) {
    std::ostringstream os;
    os << "accumulate_field: expected layer " << state.level + 1 << ", got " << layer.layer;
    throw ContractError(os.str());
  }
  if (layer.stream.seed != state.seed || layer.stream.index != state.draw)
    throw ContractError("accumulate_field: layer drawn from a different realization stream");
  if (layer.values.size() != state.values.size()) throw ContractError("accumulate_field: value count mismatch");
  FieldState next;
  next.level = layer.layer;
  next.grid = state.grid;
  next.seed = state.seed;
  next.draw = state.draw;
  next.variance = std::log(layer.cutoff_upper);
  next.values.resize(state.values.size());
  for (std::size_t i = 0; i < state.values.size(); ++i) next.values[i] = state.values[i] + layer.values[i];
  return next;
}

double field_variance(int n, const CutoffSequence& seq) {
  if (n < 0) throw IndexError("field_variance: level must be nonnegative");
  return std::log(seq.cutoff(n));
}

LayerSampler::LayerSampler(const GridSpec& grid, int layer, const CutoffSequence& seq, MassParam m,
                           const SamplerOptions& options)
    : grid_(grid),
      layer_(layer),
      cutoff_lower_(seq.cutoff(layer - 1)),
      cutoff_upper_(seq.cutoff(layer)),
      table_(layer, seq, m) {
  if (trivial()) return;
  SamplerMethod method = options.method;
  if (method == SamplerMethod::automatic)
    method = grid.node_count() <= options.dense_node_limit ? SamplerMethod::cholesky : SamplerMethod::circulant;
  if (method == SamplerMethod::circulant) {
    if (try_circulant(options)) return;
    if (grid.node_count() > options.dense_node_limit) {
      std::ostringstream os;
      os << "circulant embedding for layer " << layer << " is not nonnegative-definite up to padding "
         << options.max_padding << " and the grid (" << grid.node_count() << " nodes) is too large to factorize";
      throw NumericalError(os.str());
    }
  }
  factorize_dense(options);
}

LayerSampler::~LayerSampler() = default;
LayerSampler::LayerSampler(LayerSampler&&) noexcept = default;
LayerSampler& LayerSampler::operator=(LayerSampler&&) noexcept = default;

void LayerSampler::factorize_dense(const SamplerOptions& options) {
  method_ = SamplerMethod::cholesky;
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  const auto n = static_cast<Eigen::Index>(grid_.node_count());
  const std::vector<double> lag = lag_covariances(grid_, table_, nx, ny);

  std::ostringstream tried;
  for (double jitter = options.initial_jitter; jitter <= options.max_jitter * (1.0 + 1e-9); jitter *= 10.0) {
    factor_.resize(n, n);
    for (Eigen::Index b = 0; b < n; ++b) {
      const int ib = static_cast<int>(b % nx);
      const int jb = static_cast<int>(b / nx);
      for (Eigen::Index a = b; a < n; ++a) {
        const int di = std::abs(static_cast<int>(a % nx) - ib);
        const int dj = std::abs(static_cast<int>(a / nx) - jb);
        factor_(a, b) = lag[static_cast<std::size_t>(dj) * nx + di];
      }
      factor_(b, b) += jitter;
    }
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>, Eigen::Lower> llt(factor_);
    if (llt.info() == Eigen::Success) {
      jitter_ = jitter;
      // The strict upper triangle still holds covariance entries; clear it so
      // the factor can be used as a plain dense matrix.
      factor_.triangularView<Eigen::StrictlyUpper>().setZero();
      return;
    }
    tried << ' ' << jitter;
  }
  factor_.resize(0, 0);
  std::ostringstream os;
  os << "Cholesky factorization of layer " << layer_ << " covariance (" << n << " nodes, zero-lag variance "
     << table_.zero_lag() << ") failed for jitters" << tried.str();
  throw NumericalError(os.str());
}

bool LayerSampler::try_circulant(const SamplerOptions& options) {
  for (int pad = 2; pad <= options.max_padding; pad *= 2) {
    auto circ = std::make_unique<Circulant>();
    circ->mx = pad * grid_.nx();
    circ->my = pad * grid_.ny();
    const auto total = static_cast<std::size_t>(circ->mx) * static_cast<std::size_t>(circ->my);
    const std::vector<double> lag = lag_covariances(grid_, table_, circ->mx / 2 + 1, circ->my / 2 + 1);
    const int lx = circ->mx / 2 + 1;

    FftwBuffer in(total);
    FftwBuffer out(total);
    {
      std::lock_guard lock(fftw_planner_mutex());
      circ->plan = fftw_plan_dft_2d(circ->my, circ->mx, in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    if (!circ->plan) throw NumericalError("FFTW failed to create a plan for the circulant embedding");
    for (int j = 0; j < circ->my; ++j) {
      const int dj = std::min(j, circ->my - j);
      for (int i = 0; i < circ->mx; ++i) {
        const int di = std::min(i, circ->mx - i);
        const std::size_t k = static_cast<std::size_t>(j) * circ->mx + i;
        in.data[k][0] = lag[static_cast<std::size_t>(dj) * lx + di];
        in.data[k][1] = 0.0;
      }
    }
    fftw_execute_dft(circ->plan, in.data, out.data);
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
      lambda_max = std::max(lambda_max, out.data[k][0]);
      lambda_min = std::min(lambda_min, out.data[k][0]);
    }
    if (lambda_min < -options.embedding_tolerance * lambda_max) continue;
    circ->amplitude.resize(total);
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t k = 0; k < total; ++k) circ->amplitude[k] = std::sqrt(std::max(out.data[k][0], 0.0) * scale);
    circulant_ = std::move(circ);
    method_ = SamplerMethod::circulant;
    padding_ = pad;
    return true;
  }
  return false;
}

LayerSample LayerSampler::blank(std::uint64_t seed, std::uint32_t draw) const {
  LayerSample s;
  s.layer = layer_;
  s.grid = grid_;
  s.values.assign(grid_.node_count(), 0.0);
  s.stream = StreamKey{seed, streams::field_layer(layer_), draw};
  s.cutoff_lower = cutoff_lower_;
  s.cutoff_upper = cutoff_upper_;
  return s;
}

void LayerSampler::fill_dense_block(std::uint64_t seed, std::uint32_t first_draw, std::size_t count,
                                    std::vector<LayerSample>& out) const {
  const auto n = factor_.rows();
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(kBatchWidth));
  for (std::size_t c = 0; c < count; ++c) {
    Philox4x32 engine(StreamKey{seed, streams::field_layer(layer_), first_draw + static_cast<std::uint32_t>(c)});
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < n; ++i) noise(i, static_cast<Eigen::Index>(c)) = normal(engine);
  }
  const Eigen::MatrixXd field = factor_ * noise;
  for (std::size_t c = 0; c < count; ++c) {
    LayerSample s = blank(seed, first_draw + static_cast<std::uint32_t>(c));
    const auto col = field.col(static_cast<Eigen::Index>(c));
    std::copy(col.data(), col.data() + n, s.values.begin());
    out.push_back(std::move(s));
  }
}

void LayerSampler::fill_circulant(LayerSample& sample) const {
  const Circulant& circ = *circulant_;
  const auto total = static_cast<std::size_t>(circ.mx) * static_cast<std::size_t>(circ.my);
  FftwBuffer in(total);
  FftwBuffer out(total);
  Philox4x32 engine(sample.stream);
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < total; ++k) {
    in.data[k][0] = circ.amplitude[k] * normal(engine);
    in.data[k][1] = circ.amplitude[k] * normal(engine);
  }
  fftw_execute_dft(circ.plan, in.data, out.data);
  for (int j = 0; j < grid_.ny(); ++j)
    for (int i = 0; i < grid_.nx(); ++i)
      sample.values[grid_.index(i, j)] = out.data[static_cast<std::size_t>(j) * circ.mx + i][0];
}

LayerSample LayerSampler::sample(std::uint64_t seed, std::uint32_t draw) const {
  return std::move(sample_batch(seed, draw, 1).front());
}

std::vector<LayerSample> LayerSampler::sample_batch(std::uint64_t seed, std::uint32_t first_draw,
                                                    std::size_t count) const {
  std::vector<LayerSample> out;
  out.reserve(count);
  if (trivial()) {
    for (std::size_t c = 0; c < count; ++c) out.push_back(blank(seed, first_draw + static_cast<std::uint32_t>(c)));
    return out;
  }
  if (method_ == SamplerMethod::circulant) {
    for (std::size_t c = 0; c < count; ++c) {
      out.push_back(blank(seed, first_draw + static_cast<std::uint32_t>(c)));
      fill_circulant(out.back());
    }
    return out;
  }
  for (std::size_t start = 0; start < count; start += kBatchWidth) {
    const std::size_t width = std::min(kBatchWidth, count - start);
    fill_dense_block(seed, first_draw + static_cast<std::uint32_t>(start), width, out);
  }
  return out;
}

FieldSampler::FieldSampler(GridSpec grid, CutoffSequence seq, MassParam m, SamplerOptions options)
    : grid_(std::move(grid)), seq_(std::move(seq)), m_(m), options_(options) {}

const LayerSampler& FieldSampler::layer_sampler(int layer) const {
  if (layer < 1 || layer > seq_.max_index()) throw IndexError("FieldSampler: layer index out of range");
  std::lock_guard lock(mutex_);
  if (samplers_.size() < static_cast<std::size_t>(layer)) samplers_.resize(static_cast<std::size_t>(layer));
  auto& slot = samplers_[static_cast<std::size_t>(layer - 1)];
  if (!slot) slot = std::make_unique<LayerSampler>(grid_, layer, seq_, m_, options_);
  return *slot;
}

FieldState FieldSampler::sample(int level, std::uint64_t seed, std::uint32_t draw) const {
  return std::move(sample_levels(level, seed, draw).back());
}

std::vector<FieldState> FieldSampler::sample_levels(int level, std::uint64_t seed, std::uint32_t draw) const {
  std::vector<FieldState> levels;
  visit_ensemble(level, seed, draw, 1, [&](std::span<const FieldState> member) {
    levels.assign(member.begin(), member.end());
  });
  return levels;
}

std::vector<FieldState> FieldSampler::sample_ensemble(int level, std::uint64_t seed, std::uint32_t first_draw,
                                                      std::size_t count) const {
  std::vector<FieldState> out;
  out.reserve(count);
  visit_ensemble(level, seed, first_draw, count,
                 [&](std::span<const FieldState> member) { out.push_back(member.back()); });
  return out;
}

void FieldSampler::visit_ensemble(int level, std::uint64_t seed, std::uint32_t first_draw, std::size_t count,
                                  const std::function<void(std::span<const FieldState>)>& visit) const {
  if (level < 0) throw IndexError("FieldSampler: level must be nonnegative");
  std::vector<std::vector<LayerSample>> layers(static_cast<std::size_t>(level));
  std::vector<FieldState> member(static_cast<std::size_t>(level) + 1);
  for (std::size_t start = 0; start < count; start += LayerSampler::kBatchWidth) {
    const std::size_t width = std::min(LayerSampler::kBatchWidth, count - start);
    const auto block_first = first_draw + static_cast<std::uint32_t>(start);
    for (int k = 1; k <= level; ++k)
      layers[static_cast<std::size_t>(k - 1)] = layer_sampler(k).sample_batch(seed, block_first, width);
    for (std::size_t c = 0; c < width; ++c) {
      member[0] = zero_field(grid_, seed, block_first + static_cast<std::uint32_t>(c));
      for (int k = 1; k <= level; ++k)
        member[static_cast<std::size_t>(k)] =
            accumulate_field(member[static_cast<std::size_t>(k - 1)], layers[static_cast<std::size_t>(k - 1)][c]);
      visit(member);
    }
  }
}

}  // namespace ldbm
