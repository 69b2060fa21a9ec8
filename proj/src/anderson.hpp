#pragma once

#include <Eigen/Dense>

namespace laros::detail {

/// Type-II Anderson mixing for a fixed-point map s -> s + f(s).
class AndersonMixer {
 public:
  AndersonMixer(Eigen::Index dim, int memory)
      : ds_(dim, memory), df_(dim, memory), memory_(memory) {}

  void reset() {
    stored_ = 0;
    has_prev_ = false;
  }

  /// Next point from the accepted iterate s and its residual f.
  Eigen::VectorXd step(const Eigen::VectorXd& s, const Eigen::VectorXd& f) {
    if (has_prev_) {
      const int slot = head_;
      ds_.col(slot) = s - prev_s_;
      df_.col(slot) = f - prev_f_;
      head_ = (head_ + 1) % memory_;
      stored_ = std::min(stored_ + 1, memory_);
    }
    prev_s_ = s;
    prev_f_ = f;
    has_prev_ = true;
    if (stored_ == 0) return s + f;

    const Eigen::MatrixXd dfk = df_.leftCols(stored_);
    const Eigen::VectorXd gamma = dfk.colPivHouseholderQr().solve(f);
    if (!gamma.allFinite() || gamma.lpNorm<Eigen::Infinity>() > 1e6) {
      reset();
      return s + f;
    }
    return s + f - (ds_.leftCols(stored_) + dfk) * gamma;
  }

 private:
  Eigen::MatrixXd ds_;
  Eigen::MatrixXd df_;
  Eigen::VectorXd prev_s_;
  Eigen::VectorXd prev_f_;
  int memory_;
  int head_ = 0;
  int stored_ = 0;
  bool has_prev_ = false;
};

}  // namespace laros::detail
