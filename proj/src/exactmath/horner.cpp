#include "exactmath/horner.hpp"

#include <cmath>
#include <numeric>

#include "common/error.hpp"

namespace fastspline {

HornerProgram::HornerProgram(std::size_t dim, std::vector<HornerOp> ops, std::vector<Rational> constants)
    : dim_(dim), ops_(std::move(ops)), constants_(std::move(constants)) {
  if (ops_.empty()) fail(ErrorKind::InvalidArgument, "empty Horner program");
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const HornerOp& op = ops_[i];
    auto check_reg = [&](int r) {
      if (r < 0 || static_cast<std::size_t>(r) >= i)
        fail(ErrorKind::Validation, "Horner op reads an undefined register");
    };
    switch (op.code) {
      case HornerOpCode::LoadVar:
        if (op.arg < 0 || static_cast<std::size_t>(op.arg) >= dim_)
          fail(ErrorKind::Validation, "Horner variable index out of range");
        break;
      case HornerOpCode::LoadConst:
        if (op.arg < 0 || static_cast<std::size_t>(op.arg) >= constants_.size())
          fail(ErrorKind::Validation, "Horner constant index out of range");
        break;
      case HornerOpCode::Fma:
        check_reg(op.c);
        [[fallthrough]];
      case HornerOpCode::Add:
      case HornerOpCode::Mul:
        check_reg(op.a);
        check_reg(op.b);
        break;
    }
  }
  for (const auto& c : constants_) constant_values_.push_back(c.get_d());
}

double HornerProgram::evaluate(std::span<const double> x, std::span<double> r) const {
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const HornerOp& op = ops_[i];
    switch (op.code) {
      case HornerOpCode::LoadVar: r[i] = x[op.arg]; break;
      case HornerOpCode::LoadConst: r[i] = constant_values_[op.arg]; break;
      case HornerOpCode::Add: r[i] = r[op.a] + r[op.b]; break;
      case HornerOpCode::Mul: r[i] = r[op.a] * r[op.b]; break;
      case HornerOpCode::Fma: r[i] = std::fma(r[op.a], r[op.b], r[op.c]); break;
    }
  }
  return r[ops_.size() - 1];
}

double HornerProgram::evaluate(std::span<const double> x) const {
  std::vector<double> scratch(ops_.size());
  return evaluate(x, scratch);
}

Rational HornerProgram::evaluate(const RationalVector& x) const {
  std::vector<Rational> r(ops_.size());
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const HornerOp& op = ops_[i];
    switch (op.code) {
      case HornerOpCode::LoadVar: r[i] = x[op.arg]; break;
      case HornerOpCode::LoadConst: r[i] = constants_[op.arg]; break;
      case HornerOpCode::Add: r[i] = r[op.a] + r[op.b]; break;
      case HornerOpCode::Mul: r[i] = r[op.a] * r[op.b]; break;
      case HornerOpCode::Fma: r[i] = r[op.a] * r[op.b] + r[op.c]; break;
    }
  }
  return r.back();
}

MultiPoly HornerProgram::expand() const {
  std::vector<MultiPoly> r;
  r.reserve(ops_.size());
  for (const HornerOp& op : ops_) {
    switch (op.code) {
      case HornerOpCode::LoadVar: r.push_back(MultiPoly::variable(dim_, op.arg)); break;
      case HornerOpCode::LoadConst: r.push_back(MultiPoly::constant(dim_, constants_[op.arg])); break;
      case HornerOpCode::Add: r.push_back(r[op.a] + r[op.b]); break;
      case HornerOpCode::Mul: r.push_back(r[op.a] * r[op.b]); break;
      case HornerOpCode::Fma: r.push_back(r[op.a] * r[op.b] + r[op.c]); break;
    }
  }
  return r.back();
}

std::size_t HornerProgram::multiplication_count() const {
  std::size_t n = 0;
  for (const auto& op : ops_)
    if (op.code == HornerOpCode::Mul || op.code == HornerOpCode::Fma) ++n;
  return n;
}

namespace {

class HornerBuilder {
 public:
  explicit HornerBuilder(std::size_t dim) : dim_(dim), var_reg_(dim, -1) {}

  int build(const MultiPoly& p) {
    if (p.is_zero()) return constant(0);
    if (p.terms().size() == 1 && p.degree() == 0) return constant(p.terms().begin()->second);
    // Variable present in the most terms, lowest index on ties.
    std::vector<std::size_t> count(dim_, 0);
    for (const auto& [e, c] : p.terms())
      for (std::size_t i = 0; i < dim_; ++i)
        if (e[i] > 0) ++count[i];
    std::size_t v = 0;
    for (std::size_t i = 1; i < dim_; ++i)
      if (count[i] > count[v]) v = i;
    MultiPoly quotient(dim_), rest(dim_);
    for (const auto& [e, c] : p.terms()) {
      if (e[v] > 0) {
        Exponent e2 = e;
        --e2[v];
        quotient.add_term(e2, c);
      } else {
        rest.add_term(e, c);
      }
    }
    bool unit = quotient == MultiPoly::constant(dim_, 1);
    int x = variable(v);
    if (rest.is_zero()) {
      if (unit) return x;
      return emit({HornerOpCode::Mul, x, build(quotient)});
    }
    if (unit) {
      int r = build(rest);
      return emit({HornerOpCode::Add, x, r});
    }
    int q = build(quotient);
    int r = build(rest);
    return emit({HornerOpCode::Fma, x, q, r});
  }

  HornerProgram finish() { return HornerProgram(dim_, std::move(ops_), std::move(constants_)); }

 private:
  int emit(HornerOp op) {
    ops_.push_back(op);
    return static_cast<int>(ops_.size()) - 1;
  }
  int constant(const Rational& c) {
    constants_.push_back(c);
    HornerOp op{HornerOpCode::LoadConst};
    op.arg = static_cast<int>(constants_.size()) - 1;
    return emit(op);
  }
  int variable(std::size_t v) {
    if (var_reg_[v] < 0) {
      HornerOp op{HornerOpCode::LoadVar};
      op.arg = static_cast<int>(v);
      var_reg_[v] = emit(op);
    }
    return var_reg_[v];
  }

  std::size_t dim_;
  std::vector<int> var_reg_;
  std::vector<HornerOp> ops_;
  std::vector<Rational> constants_;
};

}  // namespace

HornerProgram horner_factor(const MultiPoly& p) {
  HornerBuilder b(p.dim());
  int out = b.build(p);
  HornerProgram prog = b.finish();
  // The result must sit in the last register; a bare variable load can be
  // an earlier cached register, so copy it forward with +0 in that case.
  if (static_cast<std::size_t>(out) + 1 != prog.ops().size()) {
    auto ops = prog.ops();
    auto consts = prog.constants();
    consts.push_back(0);
    HornerOp zero{HornerOpCode::LoadConst};
    zero.arg = static_cast<int>(consts.size()) - 1;
    ops.push_back(zero);
    ops.push_back({HornerOpCode::Add, out, static_cast<int>(ops.size()) - 1});
    return HornerProgram(p.dim(), std::move(ops), std::move(consts));
  }
  return prog;
}

std::size_t naive_multiplication_count(const MultiPoly& p) {
  std::size_t n = 0;
  for (const auto& [e, c] : p.terms()) {
    int d = std::accumulate(e.begin(), e.end(), 0);
    if (d == 0) continue;
    n += static_cast<std::size_t>(d - 1) + (c != 1 ? 1 : 0);
  }
  return n;
}

}  // namespace fastspline
