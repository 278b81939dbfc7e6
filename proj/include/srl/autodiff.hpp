#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "srl/data_model.hpp"
#include "srl/linalg.hpp"

// Reverse-mode differentiation over dense row-major matrices. Every value is
// rank 2; a vector is a 1 x d row. Shapes must agree exactly: the only
// broadcasting forms are scalar-times-tensor (`scale`, `add_scalar`) and the
// explicitly named `add_bias`.
namespace srl::ad {

using Shape = std::array<int, 2>;

// A learned tensor. `grad` always has the shape of `value`.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}
  Shape shape() const { return {static_cast<int>(value.rows()), static_cast<int>(value.cols())}; }
};

// Owns parameters at stable addresses, in insertion order.
class ParameterSet {
 public:
  Parameter& add(const std::string& name, Matrix value);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }

  void zero_grad();
  std::size_t scalar_count() const;

  // Versioned container: magic, version, then (name, rows, cols, raw doubles).
  std::string serialize() const;
  // Copies values into existing parameters; throws on name or shape mismatch.
  void deserialize(std::string_view blob);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

class Tape;

// Handle to a tape node.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Matrix& value() const;
  int rows() const;
  int cols() const;
  Shape shape() const { return {rows(), cols()}; }
};

class Tape {
 public:
  // With `record` false only forward values are kept (inference).
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var parameter(Parameter& param);

  const Matrix& value(Var v) const { return nodes_.at(v.id).value; }
  // Gradient accumulated at a node by the last backward pass.
  const Matrix& grad(Var v) const;

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and propagates to every node once, in reverse
  // order, accumulating into parameter gradients. A tape runs backward once.
  void backward(Var loss);

  // Internal: used by primitives.
  using Pullback = std::function<void(Tape&, const Matrix& out_grad)>;
  Var push(Matrix value, Pullback pullback);
  Matrix& grad_slot(int id);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Pullback pullback;
    Parameter* param = nullptr;
  };
  std::vector<Node> nodes_;
  bool record_;
  bool consumed_ = false;
};

// ---- primitives -----------------------------------------------------------

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // pointwise
Var scale(Var a, double c);
Var add_scalar(Var a, double c);
// Adds the 1 x d row `bias` to every row of the n x d `x`.
Var add_bias(Var x, Var bias);
Var concat(const std::vector<Var>& parts, int axis);  // axis 0 rows, 1 cols
Var slice_rows(Var a, int begin, int count);
Var slice_cols(Var a, int begin, int count);
Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
// axis 1: each row is a distribution; axis 0: each column.
Var softmax(Var a, int axis);
Var sum(Var a);
// x * mask, with the mask a constant (already scaled by 1/keep).
Var dropout(Var x, const Matrix& mask);
// Rows of `table` selected by `ids` (embedding lookup / gather).
Var lookup(Var table, const std::vector<int>& ids);
// Column-wise maximum over rows: n x d -> 1 x d. Ties go to the first row.
Var max_pool(Var a);
// Sliding windows over rows: n x d -> (n - w + 1) x (w * d).
Var unfold(Var a, int window);

// Fused relation scorer. For predicate rows P (m x dp) and argument rows A
// (k x da), row i * k + j of the result holds, for each role r,
//   P_i W_r A_j^T + [P_i, A_j] V_r + b_r
// with W stored as dp x (R * da) (block r is W_r), V as (dp + da) x R and
// b as 1 x R.
Var biaffine(Var preds, Var args, Var bilinear, Var linear, Var bias);

// Row i * k + j of `relation` (m*k x R) plus phi_p[i] + phi_a[j] on every
// column except column 0, which is forced to exactly zero.
Var tuple_scores(Var phi_p, Var phi_a, Var relation);

// Sum over rows of -log softmax(row)[gold[row]].
Var softmax_cross_entropy(Var scores, const std::vector<int>& gold);

// ---- optimisation ---------------------------------------------------------

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update of `param` in place; `m`, `v` are the moment
// buffers and `t` >= 1 the step number.
void adam_step(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, const AdamConfig& cfg,
               long t);

class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}
  // Applies one update to every parameter using its accumulated gradient.
  void step(ParameterSet& params);
  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

// ---- initialisation -------------------------------------------------------

// U(-sqrt(6 / (fan_in + fan_out)), +...).
Matrix glorot_uniform(int rows, int cols, std::mt19937_64& rng);
// rows x cols with orthonormal columns (rows >= cols) or rows, via QR.
Matrix orthogonal(int rows, int cols, std::mt19937_64& rng);

}  // namespace srl::ad
