#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinnlab/tensor.hpp"

namespace pinnlab {

/// Identifier of a value recorded on a tape (index into the node list).
using ValueId = std::int32_t;

/// Primitive operations understood by the tape.
///
/// Beyond the basic vocabulary, four fused elementwise primitives
/// (MulAdd, Leibniz2, DTanhMul, D2TanhMul) implement the product- and
/// chain-rule combinations that dominate derivative-channel propagation.
/// They are ordinary first-order ops with their own adjoints; fusing them
/// roughly halves memory traffic per iteration, which matters because the
/// trainer is single-threaded and memory-bound.
enum class Op : std::uint8_t {
    Leaf,
    MatMul,   // [n,k]x[k,m] -> [n,m]
    Add,      // same-shape elementwise
    Sub,
    Mul,
    Scale,    // alpha * a
    Tanh,
    Square,
    Negate,
    BiasAdd,  // [n,m] + broadcast [m]
    Sum,      // -> scalar
    Mean,     // -> scalar
    MulAdd,   // a.*b + c.*d
    Leibniz2, // a.*b + 2*c.*d + e.*f
    DTanhMul, // (1-a^2).*b, a = tanh output
    D2TanhMul // -2a(1-a^2).*b^2 + (1-a^2).*c, a = tanh output
};

const char* op_name(Op op);

struct Node {
    Op op = Op::Leaf;
    std::uint8_t n_in = 0;
    bool needs_grad = false;
    std::array<ValueId, 6> in{};
    double alpha = 0.0; // Scale coefficient
    Tensor val;
};

struct BackwardOptions {
    /// Free each node's primal value as the backward sweep passes it.
    /// Cuts peak memory roughly in half for large tapes, but afterwards the
    /// tape can no longer serve value() queries or a second backward().
    bool release_primals = false;
};

/// Reverse-mode autodiff tape over dense tensors.
///
/// record-style API: each operation appends a node, eagerly computes its
/// value, and returns the new ValueId. backward() runs a single reverse
/// sweep from a scalar root and returns gradients for the requested leaves.
/// Identical sequences of calls produce bit-identical values and gradients.
class Tape {
public:
    /// Registers a leaf tensor. Only leaves with requires_grad=true can
    /// receive gradients; gradient flow through other leaves is pruned.
    ValueId leaf(Tensor v, bool requires_grad);

    ValueId matmul(ValueId a, ValueId b);
    ValueId add(ValueId a, ValueId b);
    ValueId sub(ValueId a, ValueId b);
    ValueId mul(ValueId a, ValueId b);
    ValueId scale(ValueId a, double alpha);
    ValueId tanh(ValueId a);
    ValueId square(ValueId a);
    ValueId negate(ValueId a);
    ValueId bias_add(ValueId a, ValueId b);
    ValueId sum(ValueId a);
    ValueId mean(ValueId a);
    ValueId mul_add(ValueId a, ValueId b, ValueId c, ValueId d);
    ValueId leibniz2(ValueId a, ValueId b, ValueId c, ValueId d, ValueId e,
                     ValueId f);
    ValueId dtanh_mul(ValueId t, ValueId b);
    ValueId d2tanh_mul(ValueId t, ValueId b, ValueId c);

    const Tensor& value(ValueId id) const { return node(id).val; }
    const Node& node(ValueId id) const;
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Reverse sweep from scalar `root`; returns gradients aligned with
    /// `wanted` (zeros for leaves the root does not depend on).
    std::vector<Tensor> backward(ValueId root, std::span<const ValueId> wanted,
                                 const BackwardOptions& opts = {});

    /// Drops all nodes; pooled buffers are retained for reuse.
    void clear() noexcept { nodes_.clear(); }

private:
    ValueId push(Node n);
    Node& mut(ValueId id);
    ValueId unary(Op op, ValueId a);
    void check_same_shape(ValueId a, ValueId b, const char* what) const;

    std::vector<Node> nodes_;
};

} // namespace pinnlab
