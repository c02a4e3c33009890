#ifndef MBINET_TAPE_HPP
#define MBINET_TAPE_HPP

#include <Eigen/Core>
#include <deque>
#include <functional>
#include <initializer_list>
#include <vector>

namespace mbinet::ad {

// One value in the computation graph. Gradients are accumulated into
// `grad` during the reverse sweep; `back` pushes this node's gradient
// into its parents and is empty for leaves.
struct Node {
  Eigen::MatrixXd val;
  Eigen::MatrixXd grad;
  bool grad_set = false;
  std::function<void()> back;

  Eigen::Index rows() const { return val.rows(); }
  Eigen::Index cols() const { return val.cols(); }
};

template <typename Derived>
void add_grad(Node* n, const Eigen::MatrixBase<Derived>& g) {
  if (!n->grad_set) {
    n->grad = g;
    n->grad_set = true;
  } else {
    n->grad += g;
  }
}

// Arena of nodes in creation order. Creation order is a topological order,
// so the reverse sweep visits every consumer before its producers.
class Tape {
 public:
  Node* make(Eigen::MatrixXd v) {
    nodes_.emplace_back();
    Node* n = &nodes_.back();
    n->val = std::move(v);
    return n;
  }

  // Seeds must already be placed in output nodes' grad (via add_grad).
  void backward() {
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
      if (it->grad_set && it->back) it->back();
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  std::deque<Node> nodes_;
};

Node* leaf(Tape& t, Eigen::MatrixXd v);

// Leaf that flushes its gradient into an external accumulator.
Node* leaf_with_sink(Tape& t, const Eigen::MatrixXd& value,
                     Eigen::MatrixXd* grad_sink);

Node* matmul(Tape& t, Node* a, Node* b, bool trans_b = false);
Node* add(Tape& t, Node* a, Node* b);
Node* add_rowvec(Tape& t, Node* a, Node* row);  // row is 1 x C, broadcast
Node* scale(Tape& t, Node* a, double s);
Node* tanh_op(Tape& t, Node* a);
Node* log_abs(Tape& t, Node* a, double eps);  // ln(|x| + eps)
Node* softmax_rows(Tape& t, Node* a);
Node* concat_cols(Tape& t, const std::vector<Node*>& parts);
Node* mean_all(Tape& t, Node* a);  // 1x1

// 2-D convolution over a (time x frequency) grid stored as a
// T x (c_in * f_in) matrix with column index c * f_in + f. 3x3 kernels,
// stride 1 with zero padding along time, stride `stride_f` and no padding
// along frequency. kernel: c_out x (c_in * 9), bias: 1 x c_out.
Node* conv2d(Tape& t, Node* x, Node* kernel, Node* bias, int c_in, int f_in,
             int c_out, int stride_f);

inline int conv2d_f_out(int f_in, int stride_f) {
  return (f_in - 3) / stride_f + 1;
}

// Single bidirectional LSTM layer; output is T x 2H, forward states in the
// left half. Weight layout: w_ih (I x 4H), w_hh (H x 4H), bias (1 x 4H),
// gate blocks ordered [input, forget, cell, output].
Node* bilstm(Tape& t, Node* x, Node* w_ih_f, Node* w_hh_f, Node* b_f,
             Node* w_ih_b, Node* w_hh_b, Node* b_b, int hidden);

}  // namespace mbinet::ad

#endif  // MBINET_TAPE_HPP
