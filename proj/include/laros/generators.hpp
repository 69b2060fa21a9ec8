#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "laros/block.hpp"
#include "laros/matrix.hpp"

namespace laros {

enum class NoiseFamily { kUniform, kBernoulli, kNone };

/// Throws InvalidParameter for names other than uniform, bernoulli, none.
NoiseFamily parse_noise_family(std::string_view name);
std::string to_string(NoiseFamily family);

/// A = [sigma0 u0 v0^T, 0; 0, 0] + R with u0 = e_M + p, v0 = e_N + q and
/// R i.i.d. nonnegative with mean c3 * sigma0.
struct PlantedModel {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  Eigen::Index M = 0;
  Eigen::Index N = 0;
  double sigma0 = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  /// Subgaussian constant of r / sigma0 - c3; defaults per noise family.
  std::optional<double> b;
  NoiseFamily noise = NoiseFamily::kUniform;
  /// Seeds the perturbations p and q, independently of the noise.
  std::uint64_t perturbation_seed = 0;

  /// b if set; otherwise c3 for the bounded families and 0 for none.
  double subgaussian_b() const;
  /// Throws InvalidParameter.
  void validate() const;
};

struct PlantedInstance {
  DenseMatrix A;
  BlockSelector truth;
  PlantedModel model;
  std::uint64_t seed = 0;
  Vector p;
  Vector q;
};

/// Deterministic 64-bit stream for (seed, stream id).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform on [0, 1).
  double uniform();
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_[4];
  std::optional<double> spare_normal_;
};

/// uniform: i.i.d. U[0, 2 c3 sigma0]. bernoulli: 0 or 2 c3 sigma0 with
/// probability 1/2 each. none: zeros.
DenseMatrix sample_noise(NoiseFamily family, double sigma0, double c3,
                         Eigen::Index rows, Eigen::Index cols,
                         std::uint64_t seed);

/// Planted rank-one model. The four noise blocks come from separate streams,
/// so the planted block does not depend on m and n.
PlantedInstance plant_rank_one(const PlantedModel& model, std::uint64_t seed);

/// 0/1 matrix with an all-ones leading M x N block and Bernoulli(p_edge)
/// entries elsewhere.
PlantedInstance plant_biclique(Eigen::Index m, Eigen::Index n, Eigen::Index M,
                               Eigen::Index N, double p_edge,
                               std::uint64_t seed);

/// Two noisy 3 x 3 blocks on the diagonal; used as the reference fixture.
DenseMatrix paper_example_6x6();

}  // namespace laros
