// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "loadfc/tensor.hpp"

namespace loadfc {

enum class Op : std::uint8_t {
  Leaf,
  MatMul,
  Add,  // second operand may be a single row broadcast over the first
  Sub,
  Mul,
  Div,
  Scale,
  AddScalar,
  Tanh,
  Sigmoid,
  Abs,
  Square,
  MaxScalar,
  Max,
  ConcatCols,
  SliceCols,
  SliceRows,
  StackRows,
  Sum,
  Mean,
  GruCell,  // fused GRU step; see gru_cell
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid until the tape is cleared.
class Var {
 public:
  Var() = default;
  Tape* tape() const noexcept { return tape_; }
  std::uint32_t id() const noexcept { return id_; }
  const Tensor& value() const;
  double item() const;  // single-element value

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Per-node scalar or slice parameters.
struct OpAttr {
  double scalar = 0.0;
  std::size_t begin = 0;
  std::size_t len = 0;
};

/// Append-only record of primitive operations. Nodes are stored in creation
/// order, which is a topological order, so backward is a single reverse
/// sweep.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf bound to `p`; repeated calls for the same parameter reuse the node.
  Var param(Parameter& p);

  /// Writes d(loss)/d(p) into the grad of every parameter on this tape
  /// (accumulating) and marks them ready for an optimizer step.
  void backward(Var loss);

  void clear();
  std::size_t size() const noexcept { return nodes_.size(); }
  const Tensor& value(Var v) const { return nodes_[v.id()].value; }
  /// Gradient of the last backward's loss w.r.t. `v`; empty if none flowed.
  const Tensor& grad(Var v) const { return nodes_[v.id()].grad; }
  Op op(Var v) const { return nodes_[v.id()].op; }

  using Attr = OpAttr;
  Var push(Op op, Tensor value, std::initializer_list<Var> inputs,
           Attr attr = {});
  Var push_nary(Op op, Tensor value, std::span<const Var> inputs);
  /// Node with two inputs, extra operands and saved intermediates.
  Var push_saved(Op op, Tensor value, Var in0, Var in1,
                 std::span<const Var> extra, std::vector<Tensor> saved);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Op op = Op::Leaf;
    bool requires_grad = false;
    std::int32_t in0 = -1;
    std::int32_t in1 = -1;
    std::vector<std::uint32_t> extra;  // StackRows / GruCell operands
    std::vector<Tensor> saved;         // GruCell intermediates
    Attr attr;
    Parameter* param = nullptr;
  };

  Tensor& grad_buffer(std::uint32_t id);
  void backprop_node(std::uint32_t id);
  void backprop_gru(std::uint32_t id);
  void defer(std::uint32_t leaf, std::uint32_t node, const Tensor* a,
             const Tensor* g);
  void flush_deferred();
  /// Transpose of a leaf's value, cached for the current backward pass.
  const Tensor& transposed(std::uint32_t leaf);

  std::vector<Node> nodes_;
  std::vector<std::pair<Parameter*, std::uint32_t>> params_;
  // Weight-gradient products A^T dC whose rhs is a parameter leaf.
  struct Deferred {
    std::uint32_t leaf;
    std::uint32_t node;
    const Tensor* a;
    const Tensor* g;
  };
  std::vector<Deferred> deferred_;
  std::deque<std::pair<std::uint32_t, Tensor>> transposed_;
  std::vector<double> scratch_a_, scratch_g_;
};

enum class Activation { Identity, Tanh, Sigmoid };

// Primitive operations. All operands must live on the same tape.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var scale(Var a, double c);
Var add_scalar(Var a, double c);
Var tanh(Var a);
Var sigmoid(Var a);
Var abs(Var a);
Var square(Var a);
/// Elementwise max(a, c); ties route the gradient to a.
Var max_scalar(Var a, double c);
/// Elementwise max(a, b); ties route the gradient to a.
Var maximum(Var a, Var b);
Var concat_cols(Var a, Var b);
Var slice_cols(Var a, std::size_t begin, std::size_t len);
Var slice_rows(Var a, std::size_t begin, std::size_t len);
Var stack_rows(std::span<const Var> rows);
Var sum(Var a);
Var mean(Var a);
Var activate(Var a, Activation act);

/// Fused GRU step. `params` are w_z, w_r, w_h [in, h], u_z, u_r, u_h [h, h],
/// b_z, b_r, b_h [h]. Same values and gradients as composing the primitives:
/// z = s(xW_z + hU_z + b_z), r = s(xW_r + hU_r + b_r),
/// c = tanh(xW_h + (r*h)U_h + b_h), h' = h + z*(c - h).
Var gru_cell(Var x, Var h, std::span<const Var, 9> params);

}  // namespace loadfc
