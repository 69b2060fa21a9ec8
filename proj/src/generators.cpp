#include "laros/generators.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "laros/errors.hpp"

namespace laros {

namespace {

enum Stream : std::uint64_t {
  kNoise = 0,
  kPerturbP = 1,
  kPerturbQ = 2,
  kBlock11 = 11,
  kBlock12 = 12,
  kBlock21 = 21,
  kBlock22 = 22,
  kEdges = 31,
};

constexpr double kClip = 1e-3;

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

Vector sample_perturbation(Eigen::Index size, double cap, std::uint64_t seed,
                           std::uint64_t stream) {
  Vector p = Vector::Zero(size);
  if (cap <= 0.0) return p;
  RandomStream rs(seed, stream);
  for (Eigen::Index i = 0; i < size; ++i) p(i) = rs.normal();
  const double len = p.norm();
  if (len == 0.0) return Vector::Zero(size);
  p *= cap * rs.uniform() / len;
  return p.cwiseMax(-1.0 + kClip);
}

void fill_noise(Eigen::Ref<Matrix> out, NoiseFamily family, double hi,
                RandomStream& rs) {
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      switch (family) {
        case NoiseFamily::kUniform:
          out(i, j) = hi * rs.uniform();
          break;
        case NoiseFamily::kBernoulli:
          out(i, j) = rs.bernoulli(0.5) ? hi : 0.0;
          break;
        case NoiseFamily::kNone:
          out(i, j) = 0.0;
          break;
      }
    }
  }
}

}  // namespace

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "uniform") return NoiseFamily::kUniform;
  if (name == "bernoulli") return NoiseFamily::kBernoulli;
  if (name == "none") return NoiseFamily::kNone;
  throw InvalidParameter("unknown noise family '" + std::string(name) + "'");
}

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kUniform:
      return "uniform";
    case NoiseFamily::kBernoulli:
      return "bernoulli";
    case NoiseFamily::kNone:
      return "none";
  }
  return "unknown";
}

double PlantedModel::subgaussian_b() const {
  if (b) return *b;
  return noise == NoiseFamily::kNone ? 0.0 : c3;
}

void PlantedModel::validate() const {
  if (M < 1 || N < 1 || M >= m || N >= n) {
    throw InvalidParameter("PlantedModel: need 1 <= M < m and 1 <= N < n");
  }
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    throw InvalidParameter("PlantedModel: sigma0 must be positive");
  }
  for (double c : {c1, c2, c3}) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw InvalidParameter("PlantedModel: c1, c2, c3 must be >= 0");
    }
  }
  if (b && (!(*b > 0.0) || !std::isfinite(*b))) {
    throw InvalidParameter("PlantedModel: b must be positive");
  }
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 8> words{};
  seq.generate(words.begin(), words.end());
  for (int k = 0; k < 4; ++k) {
    state_[k] = (static_cast<std::uint64_t>(words[2 * k]) << 32) | words[2 * k + 1];
  }
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

// xoshiro256**
std::uint64_t RandomStream::next() {
  const std::uint64_t out = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return out;
}

double RandomStream::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phase = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(phase);
  return r * std::cos(phase);
}

DenseMatrix sample_noise(NoiseFamily family, double sigma0, double c3,
                         Eigen::Index rows, Eigen::Index cols,
                         std::uint64_t seed) {
  if (!(c3 >= 0.0) || !std::isfinite(c3)) {
    throw InvalidParameter("sample_noise: c3 must be >= 0");
  }
  if (rows < 1 || cols < 1) {
    throw InvalidParameter("sample_noise: shape must be positive");
  }
  Matrix out(rows, cols);
  RandomStream rs(seed, kNoise);
  fill_noise(out, family, 2.0 * c3 * sigma0, rs);
  return DenseMatrix(std::move(out));
}

PlantedInstance plant_rank_one(const PlantedModel& model, std::uint64_t seed) {
  model.validate();
  const auto [m, n, M, N] = std::array{model.m, model.n, model.M, model.N};
  const Vector p = sample_perturbation(M, model.c1 * std::sqrt(double(M)),
                                       model.perturbation_seed, kPerturbP);
  const Vector q = sample_perturbation(N, model.c2 * std::sqrt(double(N)),
                                       model.perturbation_seed, kPerturbQ);
  const Vector u0 = Vector::Ones(M) + p;
  const Vector v0 = Vector::Ones(N) + q;

  Matrix a(m, n);
  const double hi = 2.0 * model.c3 * model.sigma0;
  RandomStream r11(seed, kBlock11), r12(seed, kBlock12), r21(seed, kBlock21),
      r22(seed, kBlock22);
  fill_noise(a.topLeftCorner(M, N), model.noise, hi, r11);
  fill_noise(a.topRightCorner(M, n - N), model.noise, hi, r12);
  fill_noise(a.bottomLeftCorner(m - M, N), model.noise, hi, r21);
  fill_noise(a.bottomRightCorner(m - M, n - N), model.noise, hi, r22);
  a.topLeftCorner(M, N) += model.sigma0 * u0 * v0.transpose();

  return PlantedInstance{DenseMatrix(std::move(a)),
                         BlockSelector::leading(M, N, m, n), model, seed, p, q};
}

PlantedInstance plant_biclique(Eigen::Index m, Eigen::Index n, Eigen::Index M,
                               Eigen::Index N, double p_edge,
                               std::uint64_t seed) {
  if (!(p_edge >= 0.0 && p_edge <= 1.0)) {
    throw InvalidParameter("plant_biclique: p_edge must lie in [0, 1]");
  }
  if (M < 1 || N < 1 || M > m || N > n) {
    throw InvalidParameter("plant_biclique: need 1 <= M <= m, 1 <= N <= n");
  }
  Matrix a(m, n);
  RandomStream rs(seed, kEdges);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      a(i, j) = (i < M && j < N) || rs.bernoulli(p_edge) ? 1.0 : 0.0;

  PlantedModel model;
  model.m = m;
  model.n = n;
  model.M = M;
  model.N = N;
  model.sigma0 = 1.0;
  model.noise = NoiseFamily::kBernoulli;
  model.c3 = p_edge;
  return PlantedInstance{DenseMatrix(std::move(a)),
                         BlockSelector::leading(M, N, m, n), model, seed,
                         Vector::Zero(M), Vector::Zero(N)};
}

DenseMatrix paper_example_6x6() {
  return DenseMatrix::from_rows({{0.8, 0.9, 1.1, 0.1, 0.2, 0.2},
                                 {0.8, 1.1, 0.8, 0.0, 0.0, 0.0},
                                 {1.0, 1.0, 0.8, 0.0, 0.0, 0.0},
                                 {0.0, 0.0, 0.0, 0.8, 0.9, 1.0},
                                 {0.0, 0.0, 0.0, 0.9, 1.0, 0.8},
                                 {0.0, 0.0, 0.0, 1.0, 1.1, 0.8}});
}

}  // namespace laros
