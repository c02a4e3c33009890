#include "mbinet/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "mbinet/error.hpp"

namespace mbinet {

void LossWeights::validate() const {
  for (double w : {alpha, beta, alpha_m, alpha_l, alpha_r, beta_m, beta_l,
                   beta_r})
    if (w < 0.0 || !std::isfinite(w))
      fail(ErrorKind::RangeError, "loss weights must be finite and >= 0");
}

double branch_frame_loss(const Eigen::VectorXd& frames, double target,
                         double weight) {
  if (frames.size() == 0) fail(ErrorKind::EmptyFrames, "no frame scores");
  if (weight < 0.0) fail(ErrorKind::RangeError, "negative frame-loss weight");
  double s = (target - frames.array()).square().sum();
  return weight * s / static_cast<double>(frames.size());
}

double task_loss(const std::vector<TaskPrediction>& preds,
                 const std::vector<double>& targets, double w_m, double w_l,
                 double w_r) {
  if (preds.empty()) fail(ErrorKind::EmptyBatch, "empty batch");
  if (preds.size() != targets.size())
    fail(ErrorKind::LengthMismatch, "predictions and targets differ in count");
  double acc = 0.0;
  for (std::size_t u = 0; u < preds.size(); u++) {
    const TaskPrediction& p = preds[u];
    double t = targets[u];
    double du = t - p.utterance;
    acc += du * du + branch_frame_loss(p.frame_merged, t, w_m) +
           branch_frame_loss(p.frame_left, t, w_l) +
           branch_frame_loss(p.frame_right, t, w_r);
  }
  return acc / static_cast<double>(preds.size());
}

namespace {

bool has_task(const std::vector<Task>& tasks, Task t) {
  return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

}  // namespace

LossBreakdown total_loss(const std::vector<PredictionBundle>& preds,
                         const std::vector<UtteranceTargets>& targets,
                         const LossWeights& lw,
                         const std::vector<Task>& tasks) {
  if (preds.empty()) fail(ErrorKind::EmptyBatch, "empty batch");
  if (preds.size() != targets.size())
    fail(ErrorKind::LengthMismatch, "predictions and targets differ in count");
  lw.validate();

  auto slice = [&](Task t, std::vector<TaskPrediction>& out_p,
                   std::vector<double>& out_t) {
    for (std::size_t u = 0; u < preds.size(); u++) {
      auto it = preds[u].find(t);
      if (it == preds[u].end())
        fail(ErrorKind::ShapeMismatch,
             std::string("prediction bundle lacks task ") + task_name(t));
      out_p.push_back(it->second);
      if (t == Task::Haspi) {
        if (!targets[u].haspi)
          fail(ErrorKind::MissingTarget,
               "haspi task active but target absent");
        out_t.push_back(*targets[u].haspi);
      } else {
        out_t.push_back(targets[u].intelligibility);
      }
    }
  };

  LossBreakdown b;
  std::vector<TaskPrediction> ps;
  std::vector<double> ts;
  slice(Task::Intelligibility, ps, ts);
  b.task_int = task_loss(ps, ts, lw.alpha_m, lw.alpha_l, lw.alpha_r);

  if (has_task(tasks, Task::Haspi)) {
    ps.clear();
    ts.clear();
    slice(Task::Haspi, ps, ts);
    b.task_haspi = task_loss(ps, ts, lw.beta_m, lw.beta_l, lw.beta_r);
    b.has_haspi = true;
    b.total = lw.alpha * b.task_int + lw.beta * b.task_haspi;
  } else {
    b.total = b.task_int;
  }
  return b;
}

std::map<Task, TaskSeeds> loss_seeds(const PredictionBundle& pred,
                                     const UtteranceTargets& target,
                                     const LossWeights& lw,
                                     const std::vector<Task>& tasks,
                                     std::size_t batch_size) {
  if (batch_size == 0) fail(ErrorKind::EmptyBatch, "batch_size must be >= 1");
  lw.validate();
  const double inv_u = 1.0 / static_cast<double>(batch_size);
  const bool haspi = has_task(tasks, Task::Haspi);

  std::map<Task, TaskSeeds> seeds;
  for (Task t : tasks) {
    if (t == Task::Haspi && !target.haspi)
      fail(ErrorKind::MissingTarget, "haspi task active but target absent");
    auto it = pred.find(t);
    if (it == pred.end())
      fail(ErrorKind::ShapeMismatch,
           std::string("prediction bundle lacks task ") + task_name(t));
    const TaskPrediction& p = it->second;
    double label =
        t == Task::Haspi ? *target.haspi : target.intelligibility;
    // Outer task weight: 1 for Eq.-(6) mode, alpha/beta otherwise.
    double outer = !haspi ? 1.0 : (t == Task::Haspi ? lw.beta : lw.alpha);
    double w_m = t == Task::Haspi ? lw.beta_m : lw.alpha_m;
    double w_l = t == Task::Haspi ? lw.beta_l : lw.alpha_l;
    double w_r = t == Task::Haspi ? lw.beta_r : lw.alpha_r;
    if (p.frame_merged.size() == 0 || p.frame_left.size() == 0 ||
        p.frame_right.size() == 0)
      fail(ErrorKind::EmptyFrames, "no frame scores");

    auto frame_seed = [&](const Eigen::VectorXd& frames, double w) {
      double c = outer * inv_u * 2.0 * w / static_cast<double>(frames.size());
      return Eigen::VectorXd((c * (frames.array() - label)).matrix());
    };
    TaskSeeds s;
    s.d_utterance = outer * inv_u * 2.0 * (p.utterance - label);
    s.d_frame_merged = frame_seed(p.frame_merged, w_m);
    s.d_frame_left = frame_seed(p.frame_left, w_l);
    s.d_frame_right = frame_seed(p.frame_right, w_r);
    seeds[t] = s;
  }
  return seeds;
}

}  // namespace mbinet
