#include "mbinet/tape.hpp"

#include <cmath>
#include <memory>

#include "mbinet/error.hpp"

namespace mbinet::ad {

Node* leaf(Tape& t, Eigen::MatrixXd v) { return t.make(std::move(v)); }

Node* leaf_with_sink(Tape& t, const Eigen::MatrixXd& value,
                     Eigen::MatrixXd* grad_sink) {
  Node* n = t.make(value);
  n->back = [n, grad_sink]() { *grad_sink += n->grad; };
  return n;
}

Node* matmul(Tape& t, Node* a, Node* b, bool trans_b) {
  Eigen::Index inner_a = a->cols();
  Eigen::Index inner_b = trans_b ? b->cols() : b->rows();
  if (inner_a != inner_b)
    fail(ErrorKind::ShapeMismatch,
         "matmul inner dims " + std::to_string(inner_a) + " vs " +
             std::to_string(inner_b));
  Node* out = t.make(trans_b ? Eigen::MatrixXd(a->val * b->val.transpose())
                             : Eigen::MatrixXd(a->val * b->val));
  out->back = [out, a, b, trans_b]() {
    if (trans_b) {
      add_grad(a, out->grad * b->val);
      add_grad(b, out->grad.transpose() * a->val);
    } else {
      add_grad(a, out->grad * b->val.transpose());
      add_grad(b, a->val.transpose() * out->grad);
    }
  };
  return out;
}

Node* add(Tape& t, Node* a, Node* b) {
  Node* out = t.make(a->val + b->val);
  out->back = [out, a, b]() {
    add_grad(a, out->grad);
    add_grad(b, out->grad);
  };
  return out;
}

Node* add_rowvec(Tape& t, Node* a, Node* row) {
  Node* out = t.make(a->val.rowwise() + row->val.row(0));
  out->back = [out, a, row]() {
    add_grad(a, out->grad);
    add_grad(row, out->grad.colwise().sum());
  };
  return out;
}

Node* scale(Tape& t, Node* a, double s) {
  Node* out = t.make(a->val * s);
  out->back = [out, a, s]() { add_grad(a, out->grad * s); };
  return out;
}

Node* tanh_op(Tape& t, Node* a) {
  Node* out = t.make(a->val.array().tanh().matrix());
  out->back = [out, a]() {
    add_grad(a, (out->grad.array() * (1.0 - out->val.array().square())).matrix());
  };
  return out;
}

Node* log_abs(Tape& t, Node* a, double eps) {
  Node* out = t.make((a->val.array().abs() + eps).log().matrix());
  out->back = [out, a, eps]() {
    // d/dx ln(|x| + eps) = sign(x) / (|x| + eps); zero at x == 0
    Eigen::ArrayXXd sign = a->val.array().sign();
    add_grad(a, (out->grad.array() * sign / (a->val.array().abs() + eps)).matrix());
  };
  return out;
}

Node* softmax_rows(Tape& t, Node* a) {
  Eigen::MatrixXd v = a->val;
  for (Eigen::Index r = 0; r < v.rows(); r++) {
    double m = v.row(r).maxCoeff();
    Eigen::ArrayXd e = (v.row(r).array() - m).exp();
    v.row(r) = (e / e.sum()).matrix();
  }
  Node* out = t.make(std::move(v));
  out->back = [out, a]() {
    Eigen::MatrixXd d(out->val.rows(), out->val.cols());
    for (Eigen::Index r = 0; r < out->val.rows(); r++) {
      double dot = out->grad.row(r).dot(out->val.row(r));
      d.row(r) = (out->val.row(r).array() *
                  (out->grad.row(r).array() - dot)).matrix();
    }
    add_grad(a, d);
  };
  return out;
}

Node* concat_cols(Tape& t, const std::vector<Node*>& parts) {
  Eigen::Index rows = parts.front()->rows();
  Eigen::Index cols = 0;
  for (Node* p : parts) {
    if (p->rows() != rows)
      fail(ErrorKind::ShapeMismatch, "concat_cols row count mismatch");
    cols += p->cols();
  }
  Eigen::MatrixXd v(rows, cols);
  Eigen::Index at = 0;
  for (Node* p : parts) {
    v.middleCols(at, p->cols()) = p->val;
    at += p->cols();
  }
  Node* out = t.make(std::move(v));
  std::vector<Node*> ps = parts;
  out->back = [out, ps]() {
    Eigen::Index at = 0;
    for (Node* p : ps) {
      add_grad(p, out->grad.middleCols(at, p->cols()));
      at += p->cols();
    }
  };
  return out;
}

Node* mean_all(Tape& t, Node* a) {
  Eigen::MatrixXd v(1, 1);
  v(0, 0) = a->val.mean();
  Node* out = t.make(std::move(v));
  out->back = [out, a]() {
    double g = out->grad(0, 0) / static_cast<double>(a->val.size());
    add_grad(a, Eigen::MatrixXd::Constant(a->rows(), a->cols(), g));
  };
  return out;
}

Node* conv2d(Tape& t, Node* x, Node* kernel, Node* bias, int c_in, int f_in,
             int c_out, int stride_f) {
  const Eigen::Index t_len = x->rows();
  if (x->cols() != static_cast<Eigen::Index>(c_in) * f_in)
    fail(ErrorKind::ShapeMismatch,
         "conv2d input has " + std::to_string(x->cols()) +
             " columns, expected " + std::to_string(c_in * f_in));
  const int f_out = conv2d_f_out(f_in, stride_f);
  if (f_out < 1)
    fail(ErrorKind::ShapeMismatch,
         "conv2d frequency axis of " + std::to_string(f_in) +
             " too small for a 3-tap stride-" + std::to_string(stride_f) +
             " stage");
  if (kernel->rows() != c_out || kernel->cols() != c_in * 9)
    fail(ErrorKind::ShapeMismatch, "conv2d kernel shape mismatch");

  // im2col: row (t * f_out + fo), column (ci * 9 + dt * 3 + df)
  auto patches = std::make_shared<Eigen::MatrixXd>(t_len * f_out,
                                                   static_cast<Eigen::Index>(c_in) * 9);
  patches->setZero();
  for (Eigen::Index ti = 0; ti < t_len; ti++) {
    for (int fo = 0; fo < f_out; fo++) {
      Eigen::Index prow = ti * f_out + fo;
      for (int ci = 0; ci < c_in; ci++)
        for (int dt = 0; dt < 3; dt++) {
          Eigen::Index tt = ti - 1 + dt;
          if (tt < 0 || tt >= t_len) continue;
          for (int df = 0; df < 3; df++)
            (*patches)(prow, ci * 9 + dt * 3 + df) =
                x->val(tt, static_cast<Eigen::Index>(ci) * f_in + fo * stride_f + df);
        }
    }
  }

  Eigen::MatrixXd flat = *patches * kernel->val.transpose();  // (T*f_out) x c_out
  Eigen::MatrixXd v(t_len, static_cast<Eigen::Index>(c_out) * f_out);
  for (Eigen::Index ti = 0; ti < t_len; ti++)
    for (int co = 0; co < c_out; co++)
      for (int fo = 0; fo < f_out; fo++)
        v(ti, static_cast<Eigen::Index>(co) * f_out + fo) =
            flat(ti * f_out + fo, co) + bias->val(0, co);

  Node* out = t.make(std::move(v));
  out->back = [out, x, kernel, bias, patches, c_in, f_in, c_out, f_out,
               stride_f, t_len]() {
    Eigen::MatrixXd gflat(t_len * f_out, c_out);
    for (Eigen::Index ti = 0; ti < t_len; ti++)
      for (int co = 0; co < c_out; co++)
        for (int fo = 0; fo < f_out; fo++)
          gflat(ti * f_out + fo, co) =
              out->grad(ti, static_cast<Eigen::Index>(co) * f_out + fo);

    add_grad(kernel, gflat.transpose() * (*patches));
    add_grad(bias, gflat.colwise().sum());

    Eigen::MatrixXd gpatch = gflat * kernel->val;  // (T*f_out) x (c_in*9)
    Eigen::MatrixXd gx = Eigen::MatrixXd::Zero(t_len,
                                               static_cast<Eigen::Index>(c_in) * f_in);
    for (Eigen::Index ti = 0; ti < t_len; ti++)
      for (int fo = 0; fo < f_out; fo++) {
        Eigen::Index prow = ti * f_out + fo;
        for (int ci = 0; ci < c_in; ci++)
          for (int dt = 0; dt < 3; dt++) {
            Eigen::Index tt = ti - 1 + dt;
            if (tt < 0 || tt >= t_len) continue;
            for (int df = 0; df < 3; df++)
              gx(tt, static_cast<Eigen::Index>(ci) * f_in + fo * stride_f + df) +=
                  gpatch(prow, ci * 9 + dt * 3 + df);
          }
      }
    add_grad(x, gx);
  };
  return out;
}

namespace {

struct LstmTrace {
  Eigen::MatrixXd ig, fg, gg, og;  // post-activation gates, T x H
  Eigen::MatrixXd c, tc, h;        // cell, tanh(cell), hidden, T x H
};

Eigen::MatrixXd reverse_rows(const Eigen::MatrixXd& m) {
  return m.colwise().reverse();
}

// One direction over inputs already in processing order.
LstmTrace lstm_forward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w_ih,
                       const Eigen::MatrixXd& w_hh, const Eigen::MatrixXd& b,
                       int hidden) {
  const Eigen::Index t_len = x.rows();
  const int h = hidden;
  LstmTrace tr;
  tr.ig.resize(t_len, h);
  tr.fg.resize(t_len, h);
  tr.gg.resize(t_len, h);
  tr.og.resize(t_len, h);
  tr.c.resize(t_len, h);
  tr.tc.resize(t_len, h);
  tr.h.resize(t_len, h);

  Eigen::MatrixXd pre_x = x * w_ih;  // T x 4H
  Eigen::RowVectorXd h_prev = Eigen::RowVectorXd::Zero(h);
  Eigen::RowVectorXd c_prev = Eigen::RowVectorXd::Zero(h);
  for (Eigen::Index t = 0; t < t_len; t++) {
    Eigen::RowVectorXd pre = pre_x.row(t) + h_prev * w_hh + b.row(0);
    auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
    for (int j = 0; j < h; j++) {
      tr.ig(t, j) = sig(pre(j));
      tr.fg(t, j) = sig(pre(h + j));
      tr.gg(t, j) = std::tanh(pre(2 * h + j));
      tr.og(t, j) = sig(pre(3 * h + j));
    }
    tr.c.row(t) = tr.fg.row(t).cwiseProduct(c_prev) +
                  tr.ig.row(t).cwiseProduct(tr.gg.row(t));
    tr.tc.row(t) = tr.c.row(t).array().tanh().matrix();
    tr.h.row(t) = tr.og.row(t).cwiseProduct(tr.tc.row(t));
    h_prev = tr.h.row(t);
    c_prev = tr.c.row(t);
  }
  return tr;
}

struct LstmGrads {
  Eigen::MatrixXd dx, dw_ih, dw_hh, db;
};

LstmGrads lstm_backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w_ih,
                        const Eigen::MatrixXd& w_hh, const LstmTrace& tr,
                        const Eigen::MatrixXd& dh_out, int hidden) {
  const Eigen::Index t_len = x.rows();
  const int h = hidden;
  Eigen::MatrixXd dgates(t_len, 4 * h);  // pre-activation gate grads

  Eigen::RowVectorXd dh_next = Eigen::RowVectorXd::Zero(h);
  Eigen::RowVectorXd dc_next = Eigen::RowVectorXd::Zero(h);
  for (Eigen::Index t = t_len - 1; t >= 0; t--) {
    Eigen::RowVectorXd dh = dh_out.row(t) + dh_next;
    Eigen::RowVectorXd do_ = dh.cwiseProduct(tr.tc.row(t));
    Eigen::RowVectorXd dc =
        dh.cwiseProduct(tr.og.row(t))
            .cwiseProduct((1.0 - tr.tc.row(t).array().square()).matrix()) +
        dc_next;
    Eigen::RowVectorXd c_prev = t > 0 ? Eigen::RowVectorXd(tr.c.row(t - 1))
                                      : Eigen::RowVectorXd::Zero(h);
    Eigen::RowVectorXd di = dc.cwiseProduct(tr.gg.row(t));
    Eigen::RowVectorXd dg = dc.cwiseProduct(tr.ig.row(t));
    Eigen::RowVectorXd df = dc.cwiseProduct(c_prev);

    for (int j = 0; j < h; j++) {
      double ig = tr.ig(t, j), fg = tr.fg(t, j), gg = tr.gg(t, j),
             og = tr.og(t, j);
      dgates(t, j) = di(j) * ig * (1.0 - ig);
      dgates(t, h + j) = df(j) * fg * (1.0 - fg);
      dgates(t, 2 * h + j) = dg(j) * (1.0 - gg * gg);
      dgates(t, 3 * h + j) = do_(j) * og * (1.0 - og);
    }
    dh_next = dgates.row(t) * w_hh.transpose();
    dc_next = dc.cwiseProduct(tr.fg.row(t));
  }

  LstmGrads g;
  g.dx = dgates * w_ih.transpose();
  g.dw_ih = x.transpose() * dgates;
  g.dw_hh.setZero(h, 4 * h);
  for (Eigen::Index t = 1; t < t_len; t++)
    g.dw_hh += tr.h.row(t - 1).transpose() * dgates.row(t);
  g.db = dgates.colwise().sum();
  return g;
}

}  // namespace

Node* bilstm(Tape& t, Node* x, Node* w_ih_f, Node* w_hh_f, Node* b_f,
             Node* w_ih_b, Node* w_hh_b, Node* b_b, int hidden) {
  if (x->cols() != w_ih_f->rows() || x->cols() != w_ih_b->rows())
    fail(ErrorKind::ShapeMismatch, "bilstm input width mismatch");

  auto x_rev = std::make_shared<Eigen::MatrixXd>(reverse_rows(x->val));
  auto tr_f = std::make_shared<LstmTrace>(
      lstm_forward(x->val, w_ih_f->val, w_hh_f->val, b_f->val, hidden));
  auto tr_b = std::make_shared<LstmTrace>(
      lstm_forward(*x_rev, w_ih_b->val, w_hh_b->val, b_b->val, hidden));

  Eigen::MatrixXd v(x->rows(), 2 * hidden);
  v.leftCols(hidden) = tr_f->h;
  v.rightCols(hidden) = reverse_rows(tr_b->h);
  Node* out = t.make(std::move(v));

  out->back = [out, x, w_ih_f, w_hh_f, b_f, w_ih_b, w_hh_b, b_b, hidden,
               x_rev, tr_f, tr_b]() {
    Eigen::MatrixXd gf = out->grad.leftCols(hidden);
    Eigen::MatrixXd gb = reverse_rows(out->grad.rightCols(hidden));

    LstmGrads df = lstm_backward(x->val, w_ih_f->val, w_hh_f->val, *tr_f, gf, hidden);
    LstmGrads db = lstm_backward(*x_rev, w_ih_b->val, w_hh_b->val, *tr_b, gb, hidden);

    add_grad(x, df.dx + reverse_rows(db.dx));
    add_grad(w_ih_f, df.dw_ih);
    add_grad(w_hh_f, df.dw_hh);
    add_grad(b_f, df.db);
    add_grad(w_ih_b, db.dw_ih);
    add_grad(w_hh_b, db.dw_hh);
    add_grad(b_b, db.db);
  };
  return out;
}

}  // namespace mbinet::ad
