#include "plancompile/emit.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "common/error.hpp"
#include "exactmath/horner.hpp"

namespace fastspline {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(long long v) { return std::to_string(v); }

std::string table(const std::string& name, const std::vector<double>& values) {
  std::string out = "table " + name + " = [";
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + num(values[i]);
  return out + "]\n";
}

class Emitter {
 public:
  explicit Emitter(const EvaluationPlan& plan) : plan_(plan), s_(plan.dim) {}

  std::string run() {
    if (plan_.planes.size() > 52) fail(ErrorKind::Budget, "too many planes for a float code");
    out_ << "fastspline-kernel 1\n";
    out_ << "dim " << s_ << "\n";
    out_ << "half_texel " << (plan_.options.half_texel ? 1 : 0) << "\n";
    out_ << "input";
    for (std::size_t i = 0; i < s_; ++i) out_ << " x" << i;
    out_ << "\n";
    emit_tables();
    std::string total = "0";
    for (std::size_t k = 0; k < plan_.coset_count(); ++k) {
      std::string v = emit_coset(k);
      out_ << "let total" << k << " = " << total << " + " << v << "\n";
      total = "total" + std::to_string(k);
    }
    out_ << "out " << total << "\n";
    return out_.str();
  }

 private:
  void emit_tables() {
    std::vector<double> sigma, kern;
    for (auto v : plan_.sigma) sigma.push_back(static_cast<double>(v));
    for (const auto& sr : plan_.subregions) kern.push_back(static_cast<double>(sr.kernel));
    out_ << table("sigma", sigma) << table("kern", kern);
    for (std::size_t kk = 0; kk < plan_.kernels.size(); ++kk) {
      const PlanKernel& pk = plan_.kernels[kk];
      std::vector<double> a, b;
      std::vector<std::vector<double>> m(s_);
      for (std::size_t j = 0; j < plan_.subregions.size(); ++j) {
        std::size_t jj = plan_.subregions[j].kernel == kk ? j : pk.reference;
        const PlanSubRegion& sr = plan_.subregions[jj];
        for (std::size_t i = 0; i < s_; ++i)
          for (std::size_t l = 0; l < s_; ++l) a.push_back(sr.a(i, l).get_d());
        for (std::size_t i = 0; i < s_; ++i) b.push_back(sr.b[i].get_d());
        for (const auto& site : sr.site_map)
          for (std::size_t i = 0; i < s_; ++i) m[i].push_back(static_cast<double>(site[i]));
      }
      std::string p = "K" + std::to_string(kk) + "_";
      out_ << table(p + "A", a) << table(p + "b", b);
      for (std::size_t i = 0; i < s_; ++i) out_ << table(p + "m" + std::to_string(i), m[i]);
    }
  }

  std::string d(std::size_t i) const { return num(plan_.diagonal[i]); }

  // With d a power of two, d floor(x/d) and x - that are exact, so y lands in
  // [0, d) without correction.
  bool exact_split(std::size_t i) const {
    long long v = plan_.diagonal[i];
    return v > 0 && (v & (v - 1)) == 0;
  }

  static bool nonzero_constant(const MultiPoly& p) {
    return p.terms().size() == 1 && p.terms().begin()->first == Exponent(p.dim(), 0);
  }

  std::string emit_coset(std::size_t k) {
    std::string c = "c" + std::to_string(k) + "_";
    out_ << "# coset " << k << "\n";
    y_.assign(s_, "");
    rho_.assign(s_, "");
    flip_.assign(s_, "");
    for (std::size_t i = 0; i < s_; ++i) {
      std::string ax = std::to_string(i);
      out_ << "let " << c << "xp" << ax << " = x" << ax << " - " << num(plan_.coset_shifts[k][i]) << "\n";
      out_ << "let " << c << "r" << ax << " = " << d(i) << " * floor(" << c << "xp" << ax << " / " << d(i) << ")\n";
      out_ << "let " << c << "ya" << ax << " = " << c << "xp" << ax << " - " << c << "r" << ax << "\n";
      if (exact_split(i)) {
        out_ << "let " << c << "y" << ax << " = " << c << "ya" << ax << "\n";
        out_ << "let " << c << "rho" << ax << " = " << c << "r" << ax << "\n";
      } else {
        // Rounding can leave y on d or just below 0; move it back into the box.
        out_ << "let " << c << "hi" << ax << " = " << c << "ya" << ax << " >= " << d(i) << "\n";
        out_ << "let " << c << "yb" << ax << " = select(" << c << "hi" << ax << ", " << c << "ya" << ax << " - " << d(i)
             << ", " << c << "ya" << ax << ")\n";
        out_ << "let " << c << "rb" << ax << " = select(" << c << "hi" << ax << ", " << c << "r" << ax << " + " << d(i)
             << ", " << c << "r" << ax << ")\n";
        out_ << "let " << c << "lo" << ax << " = " << c << "yb" << ax << " < 0\n";
        out_ << "let " << c << "y" << ax << " = select(" << c << "lo" << ax << ", " << c << "yb" << ax << " + " << d(i)
             << ", " << c << "yb" << ax << ")\n";
        out_ << "let " << c << "rho" << ax << " = select(" << c << "lo" << ax << ", " << c << "rb" << ax << " - " << d(i)
             << ", " << c << "rb" << ax << ")\n";
      }
      y_[i] = c + "y" + ax;
      rho_[i] = c + "rho" + ax;
      if (plan_.fold) {
        double half = static_cast<double>(plan_.diagonal[i]) * 0.5;
        out_ << "let " << c << "f" << ax << " = " << y_[i] << " > " << num(half) << "\n";
        out_ << "let " << c << "yf" << ax << " = select(" << c << "f" << ax << ", " << d(i) << " - " << y_[i] << ", "
             << y_[i] << ")\n";
        flip_[i] = c + "f" + ax;
        y_[i] = c + "yf" + ax;
      }
    }
    // Region code.
    std::string q = "0";
    for (std::size_t p = 0; p < plan_.planes.size(); ++p) {
      std::string t = c + "t" + std::to_string(p);
      out_ << "let " << t << " = ";
      for (std::size_t i = 0; i < s_; ++i)
        out_ << (i ? " + " : "") << num(plan_.planes[p].normal[i].get_d()) << " * " << y_[i];
      out_ << "\n";
      out_ << "let " << c << "q" << p << " = " << q << " + select(" << t << " >= "
           << num(plan_.planes[p].offset.get_d()) << ", " << num(static_cast<double>(std::uint64_t{1} << p))
           << ", 0)\n";
      q = c + "q" + std::to_string(p);
    }
    bool sentinel = std::find(plan_.sigma.begin(), plan_.sigma.end(), -1) != plan_.sigma.end();
    std::string j = c + "j";
    out_ << "let " << (sentinel ? c + "js" : j) << " = sigma[mod(" << q << ", " << plan_.r << ")]\n";
    if (sentinel) out_ << "let " << j << " = select(" << c << "js < 0, 0, " << c << "js)\n";
    if (plan_.kernels.size() == 1) return emit_kernel_body(k, 0, c + "k0_", j);
    std::string val = "0";
    for (std::size_t kk = 0; kk < plan_.kernels.size(); ++kk) {
      std::string acc = emit_kernel_body(k, kk, c + "k" + std::to_string(kk) + "_", j);
      out_ << "let " << c << "v" << kk << " = select(kern[" << j << "] == " << kk << ", " << acc << ", " << val << ")\n";
      val = c + "v" + std::to_string(kk);
    }
    return val;
  }

  std::string emit_horner(const HornerProgram& h, const std::string& p, const std::vector<std::string>& z) {
    const auto& ops = h.ops();
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const HornerOp& op = ops[i];
      out_ << "let " << p << i << " = ";
      switch (op.code) {
        case HornerOpCode::LoadVar: out_ << z.at(static_cast<std::size_t>(op.arg)); break;
        case HornerOpCode::LoadConst: out_ << num(h.constant_values().at(static_cast<std::size_t>(op.arg))); break;
        case HornerOpCode::Add: out_ << p << op.a << " + " << p << op.b; break;
        case HornerOpCode::Mul: out_ << p << op.a << " * " << p << op.b; break;
        case HornerOpCode::Fma: out_ << "fma(" << p << op.a << ", " << p << op.b << ", " << p << op.c << ")"; break;
      }
      out_ << "\n";
    }
    return p + std::to_string(ops.size() - 1);
  }

  std::string emit_kernel_body(std::size_t coset, std::size_t kk, const std::string& p, const std::string& j) {
    const PlanKernel& pk = plan_.kernels[kk];
    std::string kt = "K" + std::to_string(kk) + "_";
    std::size_t ss = s_ * s_, n = pk.sites.size();
    std::vector<std::string> z(s_);
    for (std::size_t i = 0; i < s_; ++i) {
      z[i] = p + "z" + std::to_string(i);
      out_ << "let " << z[i] << " = ";
      for (std::size_t l = 0; l < s_; ++l)
        out_ << (l ? " + " : "") << kt << "A[" << j << " * " << ss << " + " << i * s_ + l << "] * " << y_[l];
      out_ << " + " << kt << "b[" << j << " * " << s_ << " + " << i << "]\n";
    }
    auto site = [&](std::size_t member, std::size_t i) {
      return kt + "m" + std::to_string(i) + "[" + j + " * " + std::to_string(n) + " + " + std::to_string(member) + "]";
    };
    std::string acc = "0";
    for (std::size_t gi = 0; gi < pk.schedule.size(); ++gi) {
      const FetchGroup& g = pk.schedule[gi];
      std::string gp = p + "g" + std::to_string(gi) + "_";
      std::string w = emit_horner(horner_factor(g.g), gp + "h", z);
      std::vector<std::string> base(s_);
      for (std::size_t i = 0; i < s_; ++i) {
        std::string ax = std::to_string(i);
        out_ << "let " << gp << "m" << ax << " = " << site(g.members[0], i) << "\n";
        std::string nv = gp + "m" + ax;
        if (plan_.fold) {
          out_ << "let " << gp << "n" << ax << " = select(" << flip_[i] << ", " << num(plan_.fold_reflect[i]) << " - "
               << nv << ", " << nv << ")\n";
          nv = gp + "n" + ax;
        }
        out_ << "let " << gp << "c" << ax << " = (" << rho_[i] << " + " << nv << ") / " << d(i) << "\n";
        base[i] = gp + "c" + ax;
      }
      std::string fetch;
      if (g.axes.empty()) {
        fetch = "fetch_nearest(" + std::to_string(coset);
        for (const auto& b : base) fetch += ", " + b;
        fetch += ")";
      } else {
        std::vector<std::string> u;
        for (std::size_t a = 0; a < g.axes.size(); ++a) {
          std::string nm = emit_horner(horner_factor(g.numer[a]), gp + "u" + std::to_string(a) + "h", z);
          u.push_back(gp + "u" + std::to_string(a));
          if (nonzero_constant(g.g))
            out_ << "let " << u[a] << " = " << nm << " / " << w << "\n";
          else
            out_ << "let " << u[a] << " = select(" << w << " == 0, 0, " << nm << " / " << w << ")\n";
        }
        std::vector<std::string> coord(s_);
        for (std::size_t i = 0; i < s_; ++i) {
          std::string ax = std::to_string(i);
          std::string expr = base[i];
          for (std::size_t a = 0; a < g.axes.size(); ++a) {
            std::string dir = gp + "d" + std::to_string(a) + "_" + ax;
            out_ << "let " << dir << " = (" << site(g.members[std::size_t{1} << a], i) << " - " << site(g.members[0], i)
                 << ") / " << d(i) << "\n";
            if (plan_.fold) {
              out_ << "let " << dir << "f = select(" << flip_[i] << ", -" << dir << ", " << dir << ")\n";
              dir += "f";
            }
            expr += " + " + dir + " * " + u[a];
          }
          if (plan_.options.half_texel) {
            out_ << "let " << gp << "e" << ax << " = " << expr << "\n";
            expr = gp + "e" + ax + " + 0.5";
          }
          out_ << "let " << gp << "p" << ax << " = " << expr << "\n";
          coord[i] = gp + "p" + ax;
        }
        fetch = "fetch_linear(" + std::to_string(coset);
        for (const auto& cc : coord) fetch += ", " + cc;
        fetch += ")";
      }
      out_ << "let " << gp << "acc = " << acc << " + " << w << " * " << fetch << "\n";
      acc = gp + "acc";
    }
    return acc;
  }

  const EvaluationPlan& plan_;
  std::size_t s_;
  std::ostringstream out_;
  std::vector<std::string> y_, rho_, flip_;
};

}  // namespace

std::string emit_kernel(const EvaluationPlan& plan) { return Emitter(plan).run(); }

}  // namespace fastspline
