#include "mildns/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "mildns/errors.hpp"

namespace mildns {

WaveIndex::WaveIndex(std::initializer_list<int> k) : WaveIndex(std::span<const int>(k.begin(), k.size())) {}

WaveIndex::WaveIndex(std::span<const int> k) : dim_(static_cast<int>(k.size())) {
  if (k.size() > 3) throw ConfigError("wave index has more than three entries");
  for (std::size_t i = 0; i < k.size(); ++i) k_[i] = k[i];
}

TorusGrid::TorusGrid(std::vector<int> resolution) : dim_(static_cast<int>(resolution.size())) {
  if (dim_ < 1 || dim_ > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
  for (int a = 0; a < dim_; ++a) {
    const int m = resolution[static_cast<std::size_t>(a)];
    if (m < 8 || m % 2 != 0) {
      throw ConfigError("grid resolution must be even and >= 8, got " + std::to_string(m));
    }
    res_[static_cast<std::size_t>(a)] = m;
    size_ *= static_cast<std::size_t>(m);
  }

  lambda_.resize(size_);
  dealias_.resize(size_);
  nyquist_.resize(size_);
  for (int a = 0; a < dim_; ++a) deriv_[static_cast<std::size_t>(a)].resize(size_);

  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t flat = 0; flat < size_; ++flat) {
    const auto idx = unflatten(flat);
    double lam = 0.0;
    bool keep = true;
    bool nyq = false;
    for (int a = 0; a < dim_; ++a) {
      const int m = res_[static_cast<std::size_t>(a)];
      const int k = wavenumber(a, idx[static_cast<std::size_t>(a)]);
      lam += (two_pi * k) * (two_pi * k);
      if (3 * std::abs(k) >= m) keep = false;
      const bool is_nyq = (k == -m / 2);
      nyq = nyq || is_nyq;
      deriv_[static_cast<std::size_t>(a)][flat] = is_nyq ? 0.0 : two_pi * k;
    }
    lambda_[flat] = lam;
    dealias_[flat] = keep ? 1 : 0;
    nyquist_[flat] = nyq ? 1 : 0;
  }

  fft_ = std::make_unique<FftPlans>(resolutions());
}

TorusGrid::~TorusGrid() = default;

std::string TorusGrid::describe() const {
  std::ostringstream os;
  for (int a = 0; a < dim_; ++a) os << (a ? "x" : "") << resolution(a);
  return os.str();
}

std::array<int, 3> TorusGrid::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    const auto m = static_cast<std::size_t>(res_[static_cast<std::size_t>(a)]);
    idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % m);
    flat /= m;
  }
  return idx;
}

std::size_t TorusGrid::flatten(std::span<const int> index) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    const int m = res_[static_cast<std::size_t>(a)];
    int i = index[static_cast<std::size_t>(a)] % m;
    if (i < 0) i += m;
    flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
  }
  return flat;
}

double TorusGrid::coordinate(std::size_t flat, int axis) const {
  return unflatten(flat)[static_cast<std::size_t>(axis)] * spacing(axis);
}

int TorusGrid::wavenumber(int axis, int index) const {
  const int m = resolution(axis);
  return index < m / 2 ? index : index - m;
}

WaveIndex TorusGrid::wave_index(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::array<int, 3> k{};
  for (int a = 0; a < dim_; ++a) k[static_cast<std::size_t>(a)] = wavenumber(a, idx[static_cast<std::size_t>(a)]);
  return WaveIndex(std::span<const int>(k.data(), static_cast<std::size_t>(dim_)));
}

bool TorusGrid::in_lattice(const WaveIndex& k) const {
  if (k.dim() != dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    const int m = resolution(a);
    if (k[a] < -m / 2 || k[a] > m / 2 - 1) return false;
  }
  return true;
}

std::size_t TorusGrid::spectral_index(const WaveIndex& k) const {
  if (!in_lattice(k)) throw ConfigError("wave index outside the grid lattice");
  return flatten(k.values());
}

bool TorusGrid::same_shape(const TorusGrid& other) const {
  if (dim_ != other.dim_) return false;
  for (int a = 0; a < dim_; ++a)
    if (resolution(a) != other.resolution(a)) return false;
  return true;
}

GridPtr make_grid(std::vector<int> resolution) {
  return std::make_shared<const TorusGrid>(std::move(resolution));
}

GridPtr make_grid(int dim, int m) {
  if (dim < 1 || dim > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
  return make_grid(std::vector<int>(static_cast<std::size_t>(dim), m));
}

}  // namespace mildns
