// SPDX-License-Identifier: Apache-2.0
#include "loadfc/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loadfc/error.hpp"
#include "loadfc/kernels.hpp"

namespace loadfc {

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a,
                              const Tensor& b) {
  throw Error(ErrorKind::ShapeMismatch, std::string(op) + ": " +
                                            a.shape().str() + " vs " +
                                            b.shape().str());
}

Tape& same_tape(Var a, Var b) {
  if (a.tape() == nullptr || a.tape() != b.tape())
    throw Error(ErrorKind::ShapeMismatch, "operands live on different tapes");
  return *a.tape();
}

Shape matrix_shape(std::size_t rows, std::size_t cols) {
  return Shape{rows, cols};
}

bool same_shape(const Tensor& a, const Tensor& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

template <typename Fn>
Var unary(Var a, Op op, Fn&& fn, Tape::Attr attr = {}) {
  const Tensor& av = a.value();
  Tensor out(matrix_shape(av.rows(), av.cols()));
  const auto src = av.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = fn(src[i]);
  return a.tape()->push(op, std::move(out), {a}, attr);
}

template <typename Fn>
Var binary_same(Var a, Var b, Op op, const char* name, Fn&& fn) {
  Tape& t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!same_shape(av, bv)) shape_error(name, av, bv);
  Tensor out(matrix_shape(av.rows(), av.cols()));
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = fn(av[i], bv[i]);
  return t.push(op, std::move(out), {a, b});
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const Tensor& Var::value() const { return tape_->value(*this); }

double Var::item() const {
  const Tensor& v = value();
  if (v.size() != 1)
    throw Error(ErrorKind::NotScalarLoss, "value has shape " + v.shape().str());
  return v[0];
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::param(Parameter& p) {
  for (const auto& [ptr, id] : params_)
    if (ptr == &p) return Var(this, id);
  if (!(p.grad.shape() == p.value.shape())) p.grad = Tensor(p.value.shape());
  Node n;
  n.value = p.value;
  n.requires_grad = true;
  n.param = &p;
  nodes_.push_back(std::move(n));
  const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
  params_.emplace_back(&p, id);
  return Var(this, id);
}

Var Tape::push(Op op, Tensor value, std::initializer_list<Var> inputs,
               Attr attr) {
  Node n;
  n.value = std::move(value);
  n.op = op;
  n.attr = attr;
  auto it = inputs.begin();
  if (it != inputs.end()) {
    n.in0 = static_cast<std::int32_t>(it->id());
    n.requires_grad = nodes_[it->id()].requires_grad;
    ++it;
  }
  if (it != inputs.end()) {
    n.in1 = static_cast<std::int32_t>(it->id());
    n.requires_grad = n.requires_grad || nodes_[it->id()].requires_grad;
  }
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::push_nary(Op op, Tensor value, std::span<const Var> inputs) {
  Node n;
  n.value = std::move(value);
  n.op = op;
  n.extra.reserve(inputs.size());
  for (Var v : inputs) {
    n.extra.push_back(v.id());
    n.requires_grad = n.requires_grad || nodes_[v.id()].requires_grad;
  }
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::push_saved(Op op, Tensor value, Var in0, Var in1,
                     std::span<const Var> extra, std::vector<Tensor> saved) {
  Node n;
  n.value = std::move(value);
  n.op = op;
  n.in0 = static_cast<std::int32_t>(in0.id());
  n.in1 = static_cast<std::int32_t>(in1.id());
  n.requires_grad = nodes_[in0.id()].requires_grad || nodes_[in1.id()].requires_grad;
  n.extra.reserve(extra.size());
  for (Var v : extra) {
    n.extra.push_back(v.id());
    n.requires_grad = n.requires_grad || nodes_[v.id()].requires_grad;
  }
  n.saved = std::move(saved);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

void Tape::clear() {
  nodes_.clear();
  params_.clear();
}

Tensor& Tape::grad_buffer(std::uint32_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() != n.value.size()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this)
    throw Error(ErrorKind::NotScalarLoss, "loss belongs to another tape");
  if (nodes_[loss.id()].value.size() != 1) {
    throw Error(ErrorKind::NotScalarLoss,
                "loss has shape " + nodes_[loss.id()].value.shape().str());
  }
  for (auto& n : nodes_) n.grad = Tensor();
  deferred_.clear();
  transposed_.clear();
  grad_buffer(loss.id())[0] = 1.0;

  for (std::int64_t id = loss.id(); id >= 0; --id) {
    const auto uid = static_cast<std::uint32_t>(id);
    Node& n = nodes_[uid];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    backprop_node(uid);
  }
  flush_deferred();

  for (auto& [p, id] : params_) {
    const Tensor& g = nodes_[id].grad;
    if (g.size() == p->grad.size()) {
      auto dst = p->grad.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
    }
    p->grad_ready = true;
  }
}

const Tensor& Tape::transposed(std::uint32_t leaf) {
  for (const auto& [id, t] : transposed_)
    if (id == leaf) return t;
  const Tensor& w = nodes_[leaf].value;
  const std::size_t r = w.rows(), c = w.cols();
  Tensor t(Shape{c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) t[j * r + i] = w[i * c + j];
  transposed_.emplace_back(leaf, std::move(t));
  return transposed_.back().second;
}

void Tape::defer(std::uint32_t leaf, std::uint32_t node, const Tensor* a,
                 const Tensor* g) {
  deferred_.push_back({leaf, node, a, g});
}

// A parameter used in many products (one per time step) gets its weight
// gradient as a single stacked A^T dC product instead of one outer product
// per use. Stacking follows node order, so the result is reproducible.
void Tape::flush_deferred() {
  std::sort(deferred_.begin(), deferred_.end(),
            [](const Deferred& x, const Deferred& y) {
              return x.leaf != y.leaf ? x.leaf < y.leaf : x.node < y.node;
            });
  for (std::size_t lo = 0; lo < deferred_.size();) {
    const std::uint32_t leaf = deferred_[lo].leaf;
    std::size_t hi = lo;
    std::size_t m = 0;
    while (hi < deferred_.size() && deferred_[hi].leaf == leaf) {
      m += deferred_[hi].a->rows();
      ++hi;
    }
    const Tensor& w = nodes_[leaf].value;
    const std::size_t k = w.rows(), n = w.cols();
    scratch_a_.resize(m * k);
    scratch_g_.resize(m * n);
    auto out_a = scratch_a_.begin();
    auto out_g = scratch_g_.begin();
    for (std::size_t i = lo; i < hi; ++i) {
      out_a = std::copy(deferred_[i].a->data().begin(), deferred_[i].a->data().end(), out_a);
      out_g = std::copy(deferred_[i].g->data().begin(), deferred_[i].g->data().end(), out_g);
    }
    kernels::gemm_acc_tn({m, k, n}, scratch_a_, scratch_g_, grad_buffer(leaf).data());
    lo = hi;
  }
  deferred_.clear();
}

void Tape::backprop_gru(std::uint32_t id) {
  Node& n = nodes_[id];
  const Tensor& g = n.grad;
  const auto ix = static_cast<std::uint32_t>(n.in0);
  const auto ih = static_cast<std::uint32_t>(n.in1);
  const Tensor& x = nodes_[ix].value;
  const Tensor& h = nodes_[ih].value;
  const std::uint32_t* p = n.extra.data();
  const std::size_t rows = h.rows(), hid = h.cols();
  const std::size_t len = rows * hid;

  if (n.saved.size() == 4) {
    for (int k = 0; k < 3; ++k) n.saved.emplace_back(h.shape());
  }
  const Tensor& z = n.saved[0];
  const Tensor& r = n.saved[1];
  const Tensor& c = n.saved[2];
  const Tensor& q = n.saved[3];
  Tensor& da_z = n.saved[4];
  Tensor& da_r = n.saved[5];
  Tensor& da_c = n.saved[6];
  da_r.fill(0.0);

  std::vector<double> dh(len), dq(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const double dz = g[i] * (c[i] - h[i]);
    dh[i] = g[i] * (1.0 - z[i]);
    da_c[i] = g[i] * z[i] * (1.0 - c[i] * c[i]);
    da_z[i] = dz * z[i] * (1.0 - z[i]);
  }
  // out[rows, k] += da[rows, hid] * W[k, hid]^T
  auto back = [&](const Tensor& da, std::uint32_t leaf, std::span<double> out) {
    const Tensor& w = nodes_[leaf].value;
    if (w.rows() >= 32) {
      kernels::gemm_acc({rows, hid, w.rows()}, da.data(), transposed(leaf).data(), out);
    } else {
      kernels::gemm_acc_nt({rows, w.rows(), hid}, da.data(), w.data(), out);
    }
  };
  back(da_c, p[5], dq);
  for (std::size_t i = 0; i < len; ++i) {
    dh[i] += dq[i] * r[i];
    da_r[i] = dq[i] * h[i] * r[i] * (1.0 - r[i]);
  }

  const Tensor* da[3] = {&da_z, &da_r, &da_c};
  if (nodes_[ix].requires_grad) {
    auto gx = grad_buffer(ix).data();
    for (int k = 0; k < 3; ++k) back(*da[k], p[k], gx);
  }
  if (nodes_[ih].requires_grad) {
    for (int k = 0; k < 2; ++k) back(*da[k], p[3 + k], dh);
    auto gh = grad_buffer(ih).data();
    for (std::size_t i = 0; i < len; ++i) gh[i] += dh[i];
  }

  const Tensor* lhs[6] = {&x, &x, &x, &h, &h, &q};
  for (int k = 0; k < 6; ++k) {
    const std::uint32_t leaf = p[k];
    if (!nodes_[leaf].requires_grad) continue;
    const Tensor& dc = *da[k % 3];
    if (nodes_[leaf].param != nullptr) {
      defer(leaf, id, lhs[k], &dc);
    } else {
      const kernels::GemmDims d{rows, lhs[k]->cols(), hid};
      kernels::gemm_acc_tn(d, lhs[k]->data(), dc.data(), grad_buffer(leaf).data());
    }
  }
  for (int k = 0; k < 3; ++k) {
    const std::uint32_t leaf = p[6 + k];
    if (!nodes_[leaf].requires_grad) continue;
    auto gb = grad_buffer(leaf).data();
    for (std::size_t i = 0; i < len; ++i) gb[i % hid] += (*da[k])[i];
  }
}

void Tape::backprop_node(std::uint32_t id) {
  // Inputs always have smaller ids, so taking their grad buffers never
  // invalidates `n`.
  Node& n = nodes_[id];
  const Tensor& g = n.grad;
  auto want = [&](std::int32_t in) {
    return in >= 0 && nodes_[std::size_t(in)].requires_grad;
  };
  auto gbuf = [&](std::int32_t in) -> Tensor& {
    return grad_buffer(static_cast<std::uint32_t>(in));
  };
  auto val = [&](std::int32_t in) -> const Tensor& {
    return nodes_[std::size_t(in)].value;
  };

  switch (n.op) {
    case Op::Leaf:
      break;
    case Op::MatMul: {
      const Tensor& a = val(n.in0);
      const Tensor& b = val(n.in1);
      const kernels::GemmDims d{a.rows(), a.cols(), b.cols()};
      if (want(n.in0)) kernels::gemm_acc_nt(d, g.data(), b.data(), gbuf(n.in0).data());
      if (want(n.in1)) {
        if (nodes_[std::size_t(n.in1)].param != nullptr) {
          defer(static_cast<std::uint32_t>(n.in1), id, &a, &n.grad);
        } else {
          kernels::gemm_acc_tn(d, a.data(), g.data(), gbuf(n.in1).data());
        }
      }
      break;
    }
    case Op::Add:
    case Op::Sub: {
      const double sign = n.op == Op::Add ? 1.0 : -1.0;
      if (want(n.in0)) {
        auto ga = gbuf(n.in0).data();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
      }
      if (want(n.in1)) {
        Tensor& gb = gbuf(n.in1);
        const std::size_t cols = gb.size();
        if (cols == g.size()) {
          for (std::size_t i = 0; i < cols; ++i) gb[i] += sign * g[i];
        } else {  // broadcast row
          for (std::size_t i = 0; i < g.size(); ++i) gb[i % cols] += sign * g[i];
        }
      }
      break;
    }
    case Op::Mul: {
      const Tensor& a = val(n.in0);
      const Tensor& b = val(n.in1);
      if (want(n.in0)) {
        auto ga = gbuf(n.in0).data();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * b[i];
      }
      if (want(n.in1)) {
        auto gb = gbuf(n.in1).data();
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * a[i];
      }
      break;
    }
    case Op::Div: {
      const Tensor& a = val(n.in0);
      const Tensor& b = val(n.in1);
      if (want(n.in0)) {
        auto ga = gbuf(n.in0).data();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] / b[i];
      }
      if (want(n.in1)) {
        auto gb = gbuf(n.in1).data();
        for (std::size_t i = 0; i < gb.size(); ++i)
          gb[i] -= g[i] * a[i] / (b[i] * b[i]);
      }
      break;
    }
    case Op::Scale: {
      auto ga = gbuf(n.in0).data();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.attr.scalar * g[i];
      break;
    }
    case Op::AddScalar: {
      auto ga = gbuf(n.in0).data();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
      break;
    }
    case Op::Tanh: {
      const Tensor& y = n.value;
      auto ga = gbuf(n.in0).data();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
      break;
    }
    case Op::Sigmoid: {
      const Tensor& y = n.value;
      auto ga = gbuf(n.in0).data();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
      break;
    }
    case Op::Abs: {
      const Tensor& a = val(n.in0);
      auto ga = gbuf(n.in0).data();
      for (std::size_t i = 0; i < ga.size(); ++i) {
        const double s = a[i] > 0.0 ? 1.0 : (a[i] < 0.0 ? -1.0 : 0.0);
        ga[i] += g[i] * s;
      }
      break;
    }
    case Op::Square: {
      const Tensor& a = val(n.in0);
      auto ga = gbuf(n.in0).data();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += 2.0 * a[i] * g[i];
      break;
    }
    case Op::MaxScalar: {
      const Tensor& a = val(n.in0);
      auto ga = gbuf(n.in0).data();
      for (std::size_t i = 0; i < ga.size(); ++i)
        if (a[i] >= n.attr.scalar) ga[i] += g[i];
      break;
    }
    case Op::Max: {
      const Tensor& a = val(n.in0);
      const Tensor& b = val(n.in1);
      const bool wa = want(n.in0), wb = want(n.in1);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (a[i] >= b[i]) {
          if (wa) gbuf(n.in0)[i] += g[i];
        } else if (wb) {
          gbuf(n.in1)[i] += g[i];
        }
      }
      break;
    }
    case Op::ConcatCols: {
      const std::size_t ca = val(n.in0).cols();
      const std::size_t cb = val(n.in1).cols();
      const std::size_t rows = n.value.rows();
      if (want(n.in0)) {
        Tensor& ga = gbuf(n.in0);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < ca; ++c) ga[r * ca + c] += g[r * (ca + cb) + c];
      }
      if (want(n.in1)) {
        Tensor& gb = gbuf(n.in1);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < cb; ++c)
            gb[r * cb + c] += g[r * (ca + cb) + ca + c];
      }
      break;
    }
    case Op::SliceCols: {
      Tensor& ga = gbuf(n.in0);
      const std::size_t cols = ga.cols();
      const std::size_t rows = n.value.rows();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < n.attr.len; ++c)
          ga[r * cols + n.attr.begin + c] += g[r * n.attr.len + c];
      break;
    }
    case Op::SliceRows: {
      Tensor& ga = gbuf(n.in0);
      const std::size_t offset = n.attr.begin * ga.cols();
      for (std::size_t i = 0; i < g.size(); ++i) ga[offset + i] += g[i];
      break;
    }
    case Op::StackRows: {
      std::size_t offset = 0;
      for (std::uint32_t in : n.extra) {
        const std::size_t len = nodes_[in].value.size();
        if (nodes_[in].requires_grad) {
          Tensor& ga = grad_buffer(in);
          for (std::size_t i = 0; i < len; ++i) ga[i] += g[offset + i];
        }
        offset += len;
      }
      break;
    }
    case Op::GruCell:
      backprop_gru(id);
      break;
    case Op::Sum:
    case Op::Mean: {
      Tensor& ga = gbuf(n.in0);
      const double s =
          n.op == Op::Sum ? g[0] : g[0] / static_cast<double>(ga.size());
      auto d = ga.data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += s;
      break;
    }
  }
}

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
  Tensor out(matrix_shape(av.rows(), bv.cols()));
  kernels::gemm({av.rows(), av.cols(), bv.cols()}, av.data(), bv.data(),
                out.data());
  return t.push(Op::MatMul, std::move(out), {a, b});
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tensor out(matrix_shape(av.rows(), av.cols()));
  auto dst = out.data();
  if (same_shape(av, bv)) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = av[i] + bv[i];
  } else if (bv.rows() == 1 && bv.cols() == av.cols()) {
    const std::size_t cols = av.cols();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = av[i] + bv[i % cols];
  } else {
    shape_error("add", av, bv);
  }
  return t.push(Op::Add, std::move(out), {a, b});
}

Var sub(Var a, Var b) {
  return binary_same(a, b, Op::Sub, "sub",
                     [](double x, double y) { return x - y; });
}

Var mul(Var a, Var b) {
  return binary_same(a, b, Op::Mul, "mul",
                     [](double x, double y) { return x * y; });
}

Var div(Var a, Var b) {
  return binary_same(a, b, Op::Div, "div",
                     [](double x, double y) { return x / y; });
}

Var maximum(Var a, Var b) {
  return binary_same(a, b, Op::Max, "maximum",
                     [](double x, double y) { return x >= y ? x : y; });
}

Var scale(Var a, double c) {
  return unary(a, Op::Scale, [c](double x) { return c * x; }, {c, 0, 0});
}

Var add_scalar(Var a, double c) {
  return unary(a, Op::AddScalar, [c](double x) { return x + c; }, {c, 0, 0});
}

Var tanh(Var a) {
  return unary(a, Op::Tanh, [](double x) { return std::tanh(x); });
}

Var sigmoid(Var a) { return unary(a, Op::Sigmoid, sigmoid_scalar); }

Var abs(Var a) {
  return unary(a, Op::Abs, [](double x) { return std::abs(x); });
}

Var square(Var a) {
  return unary(a, Op::Square, [](double x) { return x * x; });
}

Var max_scalar(Var a, double c) {
  return unary(a, Op::MaxScalar, [c](double x) { return x >= c ? x : c; },
               {c, 0, 0});
}

Var concat_cols(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows()) shape_error("concat_cols", av, bv);
  const std::size_t rows = av.rows(), ca = av.cols(), cb = bv.cols();
  Tensor out(matrix_shape(rows, ca + cb));
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(av.data().begin() + long(r * ca), ca,
                out.data().begin() + long(r * (ca + cb)));
    std::copy_n(bv.data().begin() + long(r * cb), cb,
                out.data().begin() + long(r * (ca + cb) + ca));
  }
  return t.push(Op::ConcatCols, std::move(out), {a, b});
}

Var slice_cols(Var a, std::size_t begin, std::size_t len) {
  const Tensor& av = a.value();
  if (len == 0 || begin + len > av.cols()) {
    throw Error(ErrorKind::ShapeMismatch,
                "slice_cols [" + std::to_string(begin) + ", +" +
                    std::to_string(len) + ") of " + av.shape().str());
  }
  const std::size_t rows = av.rows();
  Tensor out(matrix_shape(rows, len));
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(av.data().begin() + long(r * av.cols() + begin), len,
                out.data().begin() + long(r * len));
  return a.tape()->push(Op::SliceCols, std::move(out), {a}, {0.0, begin, len});
}

Var slice_rows(Var a, std::size_t begin, std::size_t len) {
  const Tensor& av = a.value();
  if (len == 0 || begin + len > av.rows()) {
    throw Error(ErrorKind::ShapeMismatch,
                "slice_rows [" + std::to_string(begin) + ", +" +
                    std::to_string(len) + ") of " + av.shape().str());
  }
  const std::size_t cols = av.cols();
  Tensor out(matrix_shape(len, cols),
             std::vector<double>(av.data().begin() + long(begin * cols),
                                 av.data().begin() + long((begin + len) * cols)));
  return a.tape()->push(Op::SliceRows, std::move(out), {a}, {0.0, begin, len});
}

Var stack_rows(std::span<const Var> rows) {
  if (rows.empty()) throw Error(ErrorKind::ShapeMismatch, "stack_rows of nothing");
  Tape* t = rows.front().tape();
  const std::size_t cols = rows.front().value().cols();
  std::size_t total_rows = 0;
  for (Var v : rows) {
    if (v.tape() != t || v.value().cols() != cols)
      shape_error("stack_rows", rows.front().value(), v.value());
    total_rows += v.value().rows();
  }
  std::vector<double> data;
  data.reserve(total_rows * cols);
  for (Var v : rows) {
    const auto d = v.value().data();
    data.insert(data.end(), d.begin(), d.end());
  }
  return t->push_nary(Op::StackRows,
                      Tensor(matrix_shape(total_rows, cols), std::move(data)),
                      rows);
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return a.tape()->push(Op::Sum, Tensor::scalar(s), {a});
}

Var mean(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return a.tape()->push(Op::Mean,
                        Tensor::scalar(s / static_cast<double>(a.value().size())),
                        {a});
}

Var gru_cell(Var x, Var h, std::span<const Var, 9> p) {
  Tape& t = same_tape(x, h);
  const Tensor& xv = x.value();
  const Tensor& hv = h.value();
  const std::size_t rows = xv.rows(), in = xv.cols(), hid = hv.cols();
  if (hv.rows() != rows) shape_error("gru_cell", xv, hv);
  for (int k = 0; k < 9; ++k) {
    const Tensor& pv = p[std::size_t(k)].value();
    const std::size_t want_rows = k < 3 ? in : (k < 6 ? hid : 1);
    if (p[std::size_t(k)].tape() != &t || pv.rows() != want_rows || pv.cols() != hid)
      shape_error("gru_cell parameter", hv, pv);
  }
  const std::size_t len = rows * hid;
  auto w = [&](int k) { return p[std::size_t(k)].value().data(); };

  // Pre-activations sum as (xW + hU) + b, matching the composed primitives.
  std::vector<double> xw(len), hu(len);
  auto gate = [&](int k, Tensor& out, std::span<const double> hin, auto&& fn) {
    kernels::gemm({rows, in, hid}, xv.data(), w(k), xw);
    kernels::gemm({rows, hid, hid}, hin, w(k + 3), hu);
    const auto b = w(k + 6);
    for (std::size_t i = 0; i < len; ++i) out[i] = fn((xw[i] + hu[i]) + b[i % hid]);
  };
  const Shape shape{rows, hid};
  Tensor z(shape), r(shape), c(shape), q(shape), out(shape);
  gate(0, z, hv.data(), sigmoid_scalar);
  gate(1, r, hv.data(), sigmoid_scalar);
  for (std::size_t i = 0; i < len; ++i) q[i] = r[i] * hv[i];
  gate(2, c, q.data(), [](double v) { return std::tanh(v); });
  for (std::size_t i = 0; i < len; ++i) out[i] = hv[i] + z[i] * (c[i] - hv[i]);

  std::vector<Tensor> saved;
  saved.reserve(7);
  saved.push_back(std::move(z));
  saved.push_back(std::move(r));
  saved.push_back(std::move(c));
  saved.push_back(std::move(q));
  return t.push_saved(Op::GruCell, std::move(out), x, h, p, std::move(saved));
}

Var activate(Var a, Activation act) {
  switch (act) {
    case Activation::Identity: return a;
    case Activation::Tanh: return tanh(a);
    case Activation::Sigmoid: return sigmoid(a);
  }
  return a;
}

}  // namespace loadfc
