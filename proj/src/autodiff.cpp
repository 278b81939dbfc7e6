#include "srl/autodiff.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>

namespace srl::ad {

namespace {

[[noreturn]] void shape_error(const std::string& op, Shape a, Shape b) {
  throw SrlError("ShapeMismatch", op + ": " + std::to_string(a[0]) + "x" + std::to_string(a[1]) +
                                      " vs " + std::to_string(b[0]) + "x" + std::to_string(b[1]));
}

Tape& tape_of(Var v) {
  if (v.tape == nullptr) throw SrlError("NoTape", "variable is not recorded on a tape");
  return *v.tape;
}

Tape& common_tape(Var a, Var b) {
  Tape& t = tape_of(a);
  if (&t != &tape_of(b)) throw SrlError("NoTape", "operands live on different tapes");
  return t;
}

}  // namespace

// ---- parameters -----------------------------------------------------------

Parameter& ParameterSet::add(const std::string& name, Matrix value) {
  if (contains(name)) throw SrlError("DuplicateParameter", name);
  params_.push_back(std::make_unique<Parameter>(name, std::move(value)));
  return *params_.back();
}

bool ParameterSet::contains(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name == name) return true;
  return false;
}

Parameter& ParameterSet::get(const std::string& name) {
  for (auto& p : params_)
    if (p->name == name) return *p;
  throw SrlError("UnknownParameter", name);
}

const Parameter& ParameterSet::get(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name == name) return *p;
  throw SrlError("UnknownParameter", name);
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

namespace {

constexpr char kTensorMagic[8] = {'S', 'R', 'L', 'T', 'E', 'N', 'S', '\0'};
constexpr std::uint32_t kTensorVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view& in) {
  if (in.size() < sizeof(T)) throw SrlError("CorruptCheckpoint", "truncated tensor container");
  T v;
  std::memcpy(&v, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return v;
}

}  // namespace

std::string ParameterSet::serialize() const {
  std::string out(kTensorMagic, sizeof(kTensorMagic));
  put<std::uint32_t>(out, kTensorVersion);
  put<std::uint64_t>(out, params_.size());
  for (const auto& p : params_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out += p->name;
    put<std::int64_t>(out, p->value.rows());
    put<std::int64_t>(out, p->value.cols());
    out.append(reinterpret_cast<const char*>(p->value.data()),
               sizeof(double) * static_cast<std::size_t>(p->value.size()));
  }
  return out;
}

void ParameterSet::deserialize(std::string_view in) {
  if (in.size() < sizeof(kTensorMagic) || std::memcmp(in.data(), kTensorMagic, 8) != 0)
    throw SrlError("CorruptCheckpoint", "bad tensor container magic");
  in.remove_prefix(sizeof(kTensorMagic));
  if (take<std::uint32_t>(in) != kTensorVersion)
    throw SrlError("CorruptCheckpoint", "unsupported tensor container version");
  auto count = take<std::uint64_t>(in);
  if (count != params_.size())
    throw SrlError("IncompatibleCheckpoint", "parameter count differs");
  for (auto& p : params_) {
    auto len = take<std::uint32_t>(in);
    if (in.size() < len) throw SrlError("CorruptCheckpoint", "truncated name");
    std::string name(in.substr(0, len));
    in.remove_prefix(len);
    auto rows = take<std::int64_t>(in);
    auto cols = take<std::int64_t>(in);
    if (name != p->name || rows != p->value.rows() || cols != p->value.cols())
      throw SrlError("IncompatibleCheckpoint", "tensor '" + name + "' does not match '" +
                                                   p->name + "'");
    std::size_t bytes = sizeof(double) * static_cast<std::size_t>(rows * cols);
    if (in.size() < bytes) throw SrlError("CorruptCheckpoint", "truncated tensor data");
    std::memcpy(p->value.data(), in.data(), bytes);
    in.remove_prefix(bytes);
  }
  if (!in.empty()) throw SrlError("CorruptCheckpoint", "trailing bytes in tensor container");
}

// ---- tape -----------------------------------------------------------------

const Matrix& Var::value() const { return tape_of(*this).value(*this); }
int Var::rows() const { return static_cast<int>(value().rows()); }
int Var::cols() const { return static_cast<int>(value().cols()); }

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), nullptr, nullptr});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::parameter(Parameter& param) {
  nodes_.push_back(Node{param.value, Matrix(), nullptr, record_ ? &param : nullptr});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::push(Matrix value, Pullback pullback) {
  nodes_.push_back(Node{std::move(value), Matrix(), record_ ? std::move(pullback) : nullptr,
                        nullptr});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Matrix& Tape::grad_slot(int id) {
  Node& node = nodes_[id];
  if (node.grad.size() == 0) node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

const Matrix& Tape::grad(Var v) const {
  static const Matrix kEmpty;
  const Node& node = nodes_.at(v.id);
  return node.grad.size() == 0 ? kEmpty : node.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw SrlError("NoTape", "loss is not recorded on this tape");
  if (!record_) throw SrlError("NoTape", "tape was created without recording");
  if (consumed_) throw SrlError("BackwardTwice", "backward already ran on this tape");
  const Matrix& v = value(loss);
  if (v.rows() != 1 || v.cols() != 1)
    throw SrlError("NotScalar", "loss must be 1x1, got " + std::to_string(v.rows()) + "x" +
                                    std::to_string(v.cols()));
  consumed_ = true;
  grad_slot(loss.id)(0, 0) += 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& node = nodes_[i];
    if (node.grad.size() == 0) continue;
    if (node.pullback) node.pullback(*this, node.grad);
    if (node.param != nullptr) node.param->grad += node.grad;
  }
}

// ---- primitives -----------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape& t = common_tape(a, b);
  if (a.cols() != b.rows()) shape_error("matmul", a.shape(), b.shape());
  Matrix out = a.value() * b.value();
  return t.push(std::move(out), [a, b](Tape& t, const Matrix& g) {
    t.grad_slot(a.id).noalias() += g * t.value(b).transpose();
    t.grad_slot(b.id).noalias() += t.value(a).transpose() * g;
  });
}

Var transpose(Var a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().transpose();
  return t.push(std::move(out),
                [a](Tape& t, const Matrix& g) { t.grad_slot(a.id) += g.transpose(); });
}

Var add(Var a, Var b) {
  Tape& t = common_tape(a, b);
  if (a.shape() != b.shape()) shape_error("add", a.shape(), b.shape());
  Matrix out = a.value() + b.value();
  return t.push(std::move(out), [a, b](Tape& t, const Matrix& g) {
    t.grad_slot(a.id) += g;
    t.grad_slot(b.id) += g;
  });
}

Var sub(Var a, Var b) {
  Tape& t = common_tape(a, b);
  if (a.shape() != b.shape()) shape_error("sub", a.shape(), b.shape());
  Matrix out = a.value() - b.value();
  return t.push(std::move(out), [a, b](Tape& t, const Matrix& g) {
    t.grad_slot(a.id) += g;
    t.grad_slot(b.id) -= g;
  });
}

Var mul(Var a, Var b) {
  Tape& t = common_tape(a, b);
  if (a.shape() != b.shape()) shape_error("mul", a.shape(), b.shape());
  Matrix out = a.value().cwiseProduct(b.value());
  return t.push(std::move(out), [a, b](Tape& t, const Matrix& g) {
    t.grad_slot(a.id) += g.cwiseProduct(t.value(b));
    t.grad_slot(b.id) += g.cwiseProduct(t.value(a));
  });
}

Var scale(Var a, double c) {
  Tape& t = tape_of(a);
  Matrix out = a.value() * c;
  return t.push(std::move(out), [a, c](Tape& t, const Matrix& g) { t.grad_slot(a.id) += g * c; });
}

Var add_scalar(Var a, double c) {
  Tape& t = tape_of(a);
  Matrix out = a.value().array() + c;
  return t.push(std::move(out), [a](Tape& t, const Matrix& g) { t.grad_slot(a.id) += g; });
}

Var add_bias(Var x, Var bias) {
  Tape& t = common_tape(x, bias);
  if (bias.rows() != 1 || bias.cols() != x.cols()) shape_error("add_bias", x.shape(), bias.shape());
  Matrix out = x.value().rowwise() + bias.value().row(0);
  return t.push(std::move(out), [x, bias](Tape& t, const Matrix& g) {
    t.grad_slot(x.id) += g;
    t.grad_slot(bias.id) += g.colwise().sum();
  });
}

Var concat(const std::vector<Var>& parts, int axis) {
  if (parts.empty()) throw SrlError("ShapeMismatch", "concat of nothing");
  if (axis != 0 && axis != 1) throw SrlError("ShapeMismatch", "concat axis must be 0 or 1");
  Tape& t = tape_of(parts.front());
  int rows = 0, cols = 0;
  for (const Var& p : parts) {
    if (&tape_of(p) != &t) throw SrlError("NoTape", "operands live on different tapes");
    if (axis == 0) {
      if (p.cols() != parts.front().cols()) shape_error("concat", parts.front().shape(), p.shape());
      rows += p.rows();
    } else {
      if (p.rows() != parts.front().rows()) shape_error("concat", parts.front().shape(), p.shape());
      cols += p.cols();
    }
  }
  if (axis == 0) cols = parts.front().cols();
  else rows = parts.front().rows();
  Matrix out(rows, cols);
  int offset = 0;
  for (const Var& p : parts) {
    if (axis == 0) {
      out.middleRows(offset, p.rows()) = p.value();
      offset += p.rows();
    } else {
      out.middleCols(offset, p.cols()) = p.value();
      offset += p.cols();
    }
  }
  return t.push(std::move(out), [parts, axis](Tape& t, const Matrix& g) {
    int offset = 0;
    for (const Var& p : parts) {
      const Matrix& v = t.value(p);
      if (axis == 0) {
        t.grad_slot(p.id) += g.middleRows(offset, v.rows());
        offset += static_cast<int>(v.rows());
      } else {
        t.grad_slot(p.id) += g.middleCols(offset, v.cols());
        offset += static_cast<int>(v.cols());
      }
    }
  });
}

Var slice_rows(Var a, int begin, int count) {
  Tape& t = tape_of(a);
  if (begin < 0 || count < 1 || begin + count > a.rows())
    shape_error("slice_rows", a.shape(), {begin, count});
  Matrix out = a.value().middleRows(begin, count);
  return t.push(std::move(out), [a, begin, count](Tape& t, const Matrix& g) {
    t.grad_slot(a.id).middleRows(begin, count) += g;
  });
}

Var slice_cols(Var a, int begin, int count) {
  Tape& t = tape_of(a);
  if (begin < 0 || count < 1 || begin + count > a.cols())
    shape_error("slice_cols", a.shape(), {begin, count});
  Matrix out = a.value().middleCols(begin, count);
  return t.push(std::move(out), [a, begin, count](Tape& t, const Matrix& g) {
    t.grad_slot(a.id).middleCols(begin, count) += g;
  });
}

Var sigmoid(Var a) {
  Tape& t = tape_of(a);
  Matrix out = (1.0 + (-a.value().array()).exp()).inverse().matrix();
  int self = static_cast<int>(t.size());
  return t.push(std::move(out), [a, self](Tape& t, const Matrix& g) {
    const auto y = t.value({&t, self}).array();
    t.grad_slot(a.id).array() += g.array() * y * (1.0 - y);
  });
}

Var tanh(Var a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().array().tanh().matrix();
  int self = static_cast<int>(t.size());
  return t.push(std::move(out), [a, self](Tape& t, const Matrix& g) {
    const auto y = t.value({&t, self}).array();
    t.grad_slot(a.id).array() += g.array() * (1.0 - y.square());
  });
}

Var relu(Var a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().cwiseMax(0.0);
  return t.push(std::move(out), [a](Tape& t, const Matrix& g) {
    t.grad_slot(a.id).array() += (t.value(a).array() > 0.0).select(g.array(), 0.0);
  });
}

namespace {

void softmax_rows_inplace(Matrix& m) {
  for (int r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

}  // namespace

Var softmax(Var a, int axis) {
  if (axis != 0 && axis != 1) throw SrlError("ShapeMismatch", "softmax axis must be 0 or 1");
  Tape& t = tape_of(a);
  Matrix out;
  if (axis == 1) {
    out = a.value();
    softmax_rows_inplace(out);
  } else {
    out = a.value().transpose();
    softmax_rows_inplace(out);
    out.transposeInPlace();
  }
  int self = static_cast<int>(t.size());
  return t.push(std::move(out), [a, axis, self](Tape& t, const Matrix& g) {
    const Matrix& y = t.value({&t, self});
    Matrix& ga = t.grad_slot(a.id);
    if (axis == 1) {
      for (int r = 0; r < y.rows(); ++r) {
        double dot = g.row(r).dot(y.row(r));
        ga.row(r).array() += y.row(r).array() * (g.row(r).array() - dot);
      }
    } else {
      for (int c = 0; c < y.cols(); ++c) {
        double dot = g.col(c).dot(y.col(c));
        ga.col(c).array() += y.col(c).array() * (g.col(c).array() - dot);
      }
    }
  });
}

Var sum(Var a) {
  Tape& t = tape_of(a);
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.push(std::move(out),
                [a](Tape& t, const Matrix& g) { t.grad_slot(a.id).array() += g(0, 0); });
}

Var dropout(Var x, const Matrix& mask) {
  Tape& t = tape_of(x);
  if (mask.rows() != x.rows() || mask.cols() != x.cols())
    shape_error("dropout", x.shape(),
                {static_cast<int>(mask.rows()), static_cast<int>(mask.cols())});
  Matrix out = x.value().cwiseProduct(mask);
  return t.push(std::move(out), [x, mask](Tape& t, const Matrix& g) {
    t.grad_slot(x.id) += g.cwiseProduct(mask);
  });
}

Var lookup(Var table, const std::vector<int>& ids) {
  Tape& t = tape_of(table);
  const Matrix& tv = table.value();
  Matrix out(static_cast<int>(ids.size()), tv.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= tv.rows())
      throw SrlError("ShapeMismatch", "lookup index " + std::to_string(ids[i]) + " out of range");
    out.row(static_cast<int>(i)) = tv.row(ids[i]);
  }
  return t.push(std::move(out), [table, ids](Tape& t, const Matrix& g) {
    Matrix& gt = t.grad_slot(table.id);
    for (std::size_t i = 0; i < ids.size(); ++i) gt.row(ids[i]) += g.row(static_cast<int>(i));
  });
}

Var max_pool(Var a) {
  Tape& t = tape_of(a);
  const Matrix& v = a.value();
  Matrix out(1, v.cols());
  std::vector<int> arg(v.cols());
  for (int c = 0; c < v.cols(); ++c) {
    int best = 0;
    for (int r = 1; r < v.rows(); ++r)
      if (v(r, c) > v(best, c)) best = r;
    arg[c] = best;
    out(0, c) = v(best, c);
  }
  return t.push(std::move(out), [a, arg](Tape& t, const Matrix& g) {
    Matrix& ga = t.grad_slot(a.id);
    for (std::size_t c = 0; c < arg.size(); ++c) ga(arg[c], static_cast<int>(c)) += g(0, c);
  });
}

Var unfold(Var a, int window) {
  Tape& t = tape_of(a);
  const Matrix& v = a.value();
  const int n = static_cast<int>(v.rows()), d = static_cast<int>(v.cols());
  if (window < 1 || window > n) shape_error("unfold", a.shape(), {window, d});
  Matrix out(n - window + 1, window * d);
  for (int r = 0; r + window <= n; ++r)
    for (int w = 0; w < window; ++w) out.block(r, w * d, 1, d) = v.row(r + w);
  return t.push(std::move(out), [a, window, d](Tape& t, const Matrix& g) {
    Matrix& ga = t.grad_slot(a.id);
    for (int r = 0; r < g.rows(); ++r)
      for (int w = 0; w < window; ++w) ga.row(r + w) += g.block(r, w * d, 1, d);
  });
}

Var biaffine(Var preds, Var args, Var bilinear, Var linear, Var bias) {
  Tape& t = common_tape(preds, args);
  const Matrix& P = preds.value();
  const Matrix& A = args.value();
  const Matrix& W = bilinear.value();
  const Matrix& V = linear.value();
  const Matrix& b = bias.value();
  const int m = static_cast<int>(P.rows()), k = static_cast<int>(A.rows());
  const int dp = static_cast<int>(P.cols()), da = static_cast<int>(A.cols());
  const int roles = static_cast<int>(b.cols());
  if (b.rows() != 1 || W.rows() != dp || W.cols() != roles * da)
    shape_error("biaffine bilinear", bilinear.shape(), {dp, roles * da});
  if (V.rows() != dp + da || V.cols() != roles)
    shape_error("biaffine linear", linear.shape(), {dp + da, roles});

  const Matrix PW = P * W;  // m x (R * da)
  const Matrix LP = P * V.topRows(dp);
  const Matrix LA = A * V.bottomRows(da);
  Matrix out(m * k, roles);
  for (int r = 0; r < roles; ++r) {
    const Matrix S = PW.middleCols(r * da, da) * A.transpose();  // m x k
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) out(i * k + j, r) = S(i, j) + LP(i, r) + LA(j, r) + b(0, r);
  }
  return t.push(std::move(out), [preds, args, bilinear, linear, bias, PW, m, k, dp, da, roles](
                                    Tape& t, const Matrix& g) {
    const Matrix& P = t.value(preds);
    const Matrix& A = t.value(args);
    const Matrix& W = t.value(bilinear);
    const Matrix& V = t.value(linear);
    Matrix dPW(m, roles * da);
    Matrix dA = Matrix::Zero(k, da);
    Matrix dLP = Matrix::Zero(m, roles);
    Matrix dLA = Matrix::Zero(k, roles);
    Matrix Gr(m, k);
    for (int r = 0; r < roles; ++r) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) Gr(i, j) = g(i * k + j, r);
      dPW.middleCols(r * da, da).noalias() = Gr * A;
      dA.noalias() += Gr.transpose() * PW.middleCols(r * da, da);
      dLP.col(r) = Gr.rowwise().sum();
      dLA.col(r) = Gr.colwise().sum().transpose();
    }
    Matrix& gP = t.grad_slot(preds.id);
    gP.noalias() += dPW * W.transpose();
    gP.noalias() += dLP * V.topRows(dp).transpose();
    Matrix& gA = t.grad_slot(args.id);
    gA += dA;
    gA.noalias() += dLA * V.bottomRows(da).transpose();
    t.grad_slot(bilinear.id).noalias() += P.transpose() * dPW;
    Matrix& gV = t.grad_slot(linear.id);
    gV.topRows(dp).noalias() += P.transpose() * dLP;
    gV.bottomRows(da).noalias() += A.transpose() * dLA;
    t.grad_slot(bias.id) += g.colwise().sum();
  });
}

Var tuple_scores(Var phi_p, Var phi_a, Var relation) {
  Tape& t = common_tape(phi_p, relation);
  const Matrix& pp = phi_p.value();
  const Matrix& pa = phi_a.value();
  const Matrix& rel = relation.value();
  const int m = static_cast<int>(pp.rows()), k = static_cast<int>(pa.rows());
  if (pp.cols() != 1 || pa.cols() != 1 || rel.rows() != m * k)
    shape_error("tuple_scores", relation.shape(), {m * k, static_cast<int>(rel.cols())});
  Matrix out = rel;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      out.row(i * k + j).array() += pp(i, 0) + pa(j, 0);
      out(i * k + j, 0) = 0.0;
    }
  return t.push(std::move(out), [phi_p, phi_a, relation, m, k](Tape& t, const Matrix& g) {
    Matrix masked = g;
    masked.col(0).setZero();
    t.grad_slot(relation.id) += masked;
    Matrix& gp = t.grad_slot(phi_p.id);
    Matrix& ga = t.grad_slot(phi_a.id);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) {
        double s = masked.row(i * k + j).sum();
        gp(i, 0) += s;
        ga(j, 0) += s;
      }
  });
}

Var softmax_cross_entropy(Var scores, const std::vector<int>& gold) {
  Tape& t = tape_of(scores);
  const Matrix& s = scores.value();
  if (static_cast<int>(gold.size()) != s.rows())
    shape_error("softmax_cross_entropy", scores.shape(), {static_cast<int>(gold.size()), 1});
  Matrix probs = s;
  softmax_rows_inplace(probs);
  double loss = 0.0;
  for (int r = 0; r < s.rows(); ++r) {
    if (gold[r] < 0 || gold[r] >= s.cols())
      throw SrlError("ShapeMismatch", "gold label outside score width");
    double mx = s.row(r).maxCoeff();
    double lse = mx + std::log((s.row(r).array() - mx).exp().sum());
    loss += lse - s(r, gold[r]);
  }
  Matrix out(1, 1);
  out(0, 0) = loss;
  return t.push(std::move(out), [scores, gold, probs](Tape& t, const Matrix& g) {
    Matrix d = probs;
    for (std::size_t r = 0; r < gold.size(); ++r) d(static_cast<int>(r), gold[r]) -= 1.0;
    t.grad_slot(scores.id) += g(0, 0) * d;
  });
}

// ---- optimisation ---------------------------------------------------------

void adam_step(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, const AdamConfig& cfg,
               long t) {
  if (grad.rows() != param.rows() || grad.cols() != param.cols() || m.rows() != param.rows() ||
      m.cols() != param.cols() || v.rows() != param.rows() || v.cols() != param.cols())
    throw SrlError("ShapeMismatch", "adam_step operands differ in shape");
  if (t < 1) throw SrlError("BadStep", "adam step number must be >= 1");
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  param.array() -= cfg.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
}

void Adam::step(ParameterSet& params) {
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_.push_back(Matrix::Zero(params[i].value.rows(), params[i].value.cols()));
      v_.push_back(Matrix::Zero(params[i].value.rows(), params[i].value.cols()));
    }
  }
  ++t_;
  for (std::size_t i = 0; i < params.size(); ++i)
    adam_step(params[i].value, params[i].grad, m_[i], v_[i], cfg_, t_);
}

// ---- initialisation -------------------------------------------------------

Matrix glorot_uniform(int rows, int cols, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> uni(-bound, bound);
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = uni(rng);
  return out;
}

Matrix orthogonal(int rows, int cols, std::mt19937_64& rng) {
  const int tall = std::max(rows, cols), wide = std::min(rows, cols);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(tall, wide);
  for (int r = 0; r < tall; ++r)
    for (int c = 0; c < wide; ++c) g(r, c) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall, wide);
  const Eigen::MatrixXd& rr = qr.matrixQR();
  for (int c = 0; c < wide; ++c)
    if (rr(c, c) < 0) q.col(c) *= -1.0;
  Matrix out = rows >= cols ? Matrix(q) : Matrix(q.transpose());
  return out;
}

}  // namespace srl::ad
