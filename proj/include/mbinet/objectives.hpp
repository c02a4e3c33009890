#ifndef MBINET_OBJECTIVES_HPP
#define MBINET_OBJECTIVES_HPP

#include <Eigen/Core>
#include <map>
#include <optional>
#include <vector>

#include "mbinet/model.hpp"

namespace mbinet {

struct LossWeights {
  double alpha = 1.0;    // intelligibility task weight in the combined objective
  double beta = 1.0;     // haspi task weight
  double alpha_m = 1.0;  // merged / left / right frame terms, intelligibility
  double alpha_l = 1.0;
  double alpha_r = 1.0;
  double beta_m = 1.0;   // same three for haspi
  double beta_l = 1.0;
  double beta_r = 1.0;

  void validate() const;  // RangeError on any negative weight
};

struct UtteranceTargets {
  double intelligibility = 0.0;   // 0..100
  std::optional<double> haspi;    // 0..100 after ingest scaling
};

// weight/F * sum_f (target - frames[f])^2
double branch_frame_loss(const Eigen::VectorXd& frames, double target,
                         double weight);

// Mean over utterances of the squared utterance error plus the three
// weighted frame terms (merged, left, right), all against the same target.
double task_loss(const std::vector<TaskPrediction>& preds,
                 const std::vector<double>& targets, double w_m, double w_l,
                 double w_r);

struct LossBreakdown {
  double total = 0.0;
  double task_int = 0.0;
  double task_haspi = 0.0;
  bool has_haspi = false;
};

// Combined objective: intelligibility task loss alone when tasks == {int},
// alpha * L_int + beta * L_haspi when the haspi task is active.
LossBreakdown total_loss(const std::vector<PredictionBundle>& preds,
                         const std::vector<UtteranceTargets>& targets,
                         const LossWeights& lw, const std::vector<Task>& tasks);

// Analytic gradient of the combined objective with respect to one
// utterance's predictions, for a batch of `batch_size` utterances.
std::map<Task, TaskSeeds> loss_seeds(const PredictionBundle& pred,
                                     const UtteranceTargets& target,
                                     const LossWeights& lw,
                                     const std::vector<Task>& tasks,
                                     std::size_t batch_size);

}  // namespace mbinet

#endif  // MBINET_OBJECTIVES_HPP
