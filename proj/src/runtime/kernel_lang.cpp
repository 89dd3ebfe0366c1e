#include "runtime/kernel_lang.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include "common/error.hpp"

namespace fastspline {

enum class Op { Num, Slot, Index, Neg, Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, Floor, Fma, Mod, Select, Nearest, Linear };

struct KernelProgram::Node {
  Op op;
  double value = 0;     // Num
  std::size_t ref = 0;  // Slot: slot index; Index: table index; fetches: coset
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const KernelProgram::Node>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0, std::size_t ref = 0) {
  auto n = std::make_shared<KernelProgram::Node>();
  n->op = op;
  n->args = std::move(args);
  n->value = value;
  n->ref = ref;
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t line, const std::map<std::string, std::size_t>& slots,
         const std::map<std::string, std::size_t>& tables, std::size_t dim, std::size_t* fetches)
      : text_(text), line_(line), slots_(slots), tables_(tables), dim_(dim), fetches_(fetches) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip();
    if (pos_ != text_.size()) error("unexpected '" + std::string(text_.substr(pos_, 8)) + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::Parse, "kernel line " + std::to_string(line_) + ": " + what);
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(std::string_view tok) {
    skip();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) error("expected '" + std::string(tok) + "'");
  }

  NodePtr expr() {
    NodePtr a = sum();
    static const std::pair<const char*, Op> cmps[] = {{"<=", Op::Le}, {">=", Op::Ge}, {"==", Op::Eq},
                                                      {"!=", Op::Ne}, {"<", Op::Lt},  {">", Op::Gt}};
    for (const auto& [tok, op] : cmps)
      if (accept(tok)) return make(op, {a, sum()});
    return a;
  }
  NodePtr sum() {
    NodePtr a = product();
    while (true) {
      if (accept("+")) a = make(Op::Add, {a, product()});
      else if (accept("-")) a = make(Op::Sub, {a, product()});
      else return a;
    }
  }
  NodePtr product() {
    NodePtr a = unary();
    while (true) {
      if (accept("*")) a = make(Op::Mul, {a, unary()});
      else if (accept("/")) a = make(Op::Div, {a, unary()});
      else return a;
    }
  }
  NodePtr unary() {
    if (accept("-")) return make(Op::Neg, {unary()});
    return primary();
  }
  std::vector<NodePtr> call_args() {
    std::vector<NodePtr> args;
    if (accept(")")) return args;
    do args.push_back(expr());
    while (accept(","));
    expect(")");
    return args;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) error("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(")");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string rest(text_.substr(pos_));
      char* end = nullptr;
      double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) error("bad number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      return make(Op::Num, {}, v);
    }
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) error(std::string("unexpected '") + c + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (accept("(")) return call(name, call_args());
    if (accept("[")) {
      auto it = tables_.find(name);
      if (it == tables_.end()) error("unknown table '" + name + "'");
      NodePtr idx = expr();
      expect("]");
      return make(Op::Index, {idx}, 0, it->second);
    }
    auto it = slots_.find(name);
    if (it == slots_.end()) error("unknown name '" + name + "'");
    return make(Op::Slot, {}, 0, it->second);
  }
  NodePtr call(const std::string& name, std::vector<NodePtr> args) {
    auto arity = [&](std::size_t n) {
      if (args.size() != n) error(name + " takes " + std::to_string(n) + " arguments");
    };
    if (name == "floor") return arity(1), make(Op::Floor, args);
    if (name == "fma") return arity(3), make(Op::Fma, args);
    if (name == "mod") return arity(2), make(Op::Mod, args);
    if (name == "select") return arity(3), make(Op::Select, args);
    if (name == "fetch_nearest" || name == "fetch_linear") {
      arity(dim_ + 1);
      if (args[0]->op != Op::Num || args[0]->value < 0 || args[0]->value != std::floor(args[0]->value))
        error(name + " needs a literal coset index");
      std::size_t coset = static_cast<std::size_t>(args[0]->value);
      args.erase(args.begin());
      ++*fetches_;
      return make(name == "fetch_nearest" ? Op::Nearest : Op::Linear, args, 0, coset);
    }
    error("unknown function '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  const std::map<std::string, std::size_t>& slots_;
  const std::map<std::string, std::size_t>& tables_;
  std::size_t dim_;
  std::size_t* fetches_;
};

struct Eval {
  const std::vector<std::vector<double>>& tables;
  const std::vector<double>& slots;
  const CoefficientGrid& grid;
  bool half_texel;

  double operator()(const KernelProgram::Node& n) const {
    const auto& a = n.args;
    switch (n.op) {
      case Op::Num: return n.value;
      case Op::Slot: return slots[n.ref];
      case Op::Index: {
        double i = (*this)(*a[0]);
        const auto& t = tables[n.ref];
        if (!(i >= 0) || i >= static_cast<double>(t.size()) || i != std::floor(i))
          fail(ErrorKind::InvalidArgument, "kernel table index out of range");
        return t[static_cast<std::size_t>(i)];
      }
      case Op::Neg: return -(*this)(*a[0]);
      case Op::Add: return (*this)(*a[0]) + (*this)(*a[1]);
      case Op::Sub: return (*this)(*a[0]) - (*this)(*a[1]);
      case Op::Mul: return (*this)(*a[0]) * (*this)(*a[1]);
      case Op::Div: return (*this)(*a[0]) / (*this)(*a[1]);
      case Op::Lt: return (*this)(*a[0]) < (*this)(*a[1]) ? 1.0 : 0.0;
      case Op::Le: return (*this)(*a[0]) <= (*this)(*a[1]) ? 1.0 : 0.0;
      case Op::Gt: return (*this)(*a[0]) > (*this)(*a[1]) ? 1.0 : 0.0;
      case Op::Ge: return (*this)(*a[0]) >= (*this)(*a[1]) ? 1.0 : 0.0;
      case Op::Eq: return (*this)(*a[0]) == (*this)(*a[1]) ? 1.0 : 0.0;
      case Op::Ne: return (*this)(*a[0]) != (*this)(*a[1]) ? 1.0 : 0.0;
      case Op::Floor: return std::floor((*this)(*a[0]));
      case Op::Fma: return std::fma((*this)(*a[0]), (*this)(*a[1]), (*this)(*a[2]));
      case Op::Mod: return std::fmod((*this)(*a[0]), (*this)(*a[1]));
      case Op::Select: {
        // Both arms are evaluated, as a predicated GPU select would.
        double c = (*this)(*a[0]), t = (*this)(*a[1]), f = (*this)(*a[2]);
        return c != 0.0 ? t : f;
      }
      case Op::Nearest: {
        if (n.ref >= grid.coset_count()) fail(ErrorKind::Mismatch, "kernel fetches a coset the grid lacks");
        long long m[8];
        for (std::size_t i = 0; i < a.size(); ++i) m[i] = static_cast<long long>((*this)(*a[i]));
        return grid.fetch_nearest(n.ref, std::span<const long long>(m, a.size()));
      }
      case Op::Linear: {
        if (n.ref >= grid.coset_count()) fail(ErrorKind::Mismatch, "kernel fetches a coset the grid lacks");
        double c[8];
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = (*this)(*a[i]);
        return grid.fetch_linear(n.ref, std::span<const double>(c, a.size()), half_texel);
      }
    }
    return 0.0;
  }
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace

KernelProgram KernelProgram::parse(std::string_view text) {
  KernelProgram prog;
  std::map<std::string, std::size_t> slots, tables;
  std::size_t dim = 0;
  bool header = false, have_dim = false, have_inputs = false;
  std::size_t lineno = 0;
  auto error = [&](const std::string& what) { fail(ErrorKind::Parse, "kernel line " + std::to_string(lineno) + ": " + what); };
  auto word = [](std::string_view& rest) {
    rest = trim(rest);
    std::size_t n = 0;
    while (n < rest.size() && !std::isspace(static_cast<unsigned char>(rest[n]))) ++n;
    std::string_view w = rest.substr(0, n);
    rest.remove_prefix(n);
    return w;
  };
  auto assignment = [&](std::string_view rest, std::string& name) {
    std::size_t eq = rest.find('=');
    if (eq == std::string_view::npos) error("expected '='");
    name = std::string(trim(rest.substr(0, eq)));
    if (!is_name(name)) error("bad name '" + name + "'");
    if (slots.count(name) || tables.count(name)) error("'" + name + "' defined twice");
    return trim(rest.substr(eq + 1));
  };

  while (!text.empty()) {
    ++lineno;
    std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.empty() || line[0] == '#') continue;
    std::string_view rest = line;
    std::string_view kw = word(rest);
    if (!header) {
      if (kw != "fastspline-kernel") error("missing fastspline-kernel header");
      if (trim(rest) != "1") fail(ErrorKind::Version, "unsupported kernel version '" + std::string(trim(rest)) + "'");
      header = true;
      continue;
    }
    if (prog.out_) error("statement after out");
    if (kw == "dim") {
      dim = static_cast<std::size_t>(std::atoll(std::string(trim(rest)).c_str()));
      if (dim == 0 || dim > 8) error("dim must be 1..8");
      have_dim = true;
    } else if (kw == "half_texel") {
      prog.half_texel_ = trim(rest) == "1";
    } else if (kw == "input") {
      if (!have_dim || have_inputs) error("input must follow dim, once");
      while (!trim(rest).empty()) {
        std::string n(word(rest));
        if (!is_name(n) || slots.count(n)) error("bad input name '" + n + "'");
        slots[n] = prog.inputs_.size();
        prog.inputs_.push_back(n);
      }
      if (prog.inputs_.size() != dim) error("input count does not match dim");
      have_inputs = true;
    } else if (kw == "table") {
      std::string name;
      std::string_view body = assignment(rest, name);
      if (body.size() < 2 || body.front() != '[' || body.back() != ']') error("table needs [ ... ]");
      body = body.substr(1, body.size() - 2);
      std::vector<double> values;
      while (!trim(body).empty()) {
        std::size_t comma = body.find(',');
        std::string item(trim(body.substr(0, comma)));
        char* end = nullptr;
        double v = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0') error("bad table entry '" + item + "'");
        values.push_back(v);
        body.remove_prefix(comma == std::string_view::npos ? body.size() : comma + 1);
      }
      tables[name] = prog.tables_.size();
      prog.tables_.push_back(std::move(values));
    } else if (kw == "let" || kw == "out") {
      if (!have_inputs) error("input declaration missing");
      std::string name;
      std::string_view body = kw == "let" ? assignment(rest, name) : trim(rest);
      NodePtr e = Parser(body, lineno, slots, tables, dim, &prog.fetches_).parse_all();
      if (kw == "out") {
        prog.out_ = e;
      } else {
        slots[name] = dim + prog.lets_.size();
        prog.lets_.push_back(e);
      }
    } else {
      error("unknown statement '" + std::string(kw) + "'");
    }
  }
  if (!header) fail(ErrorKind::Parse, "empty kernel program");
  if (!prog.out_) fail(ErrorKind::Parse, "kernel program has no out statement");
  return prog;
}

double KernelProgram::evaluate(std::span<const double> x, const CoefficientGrid& grid) const {
  if (x.size() != dim()) fail(ErrorKind::InvalidArgument, "kernel input has wrong dimension");
  if (grid.dim() != dim()) fail(ErrorKind::Mismatch, "grid dimension does not match the kernel");
  std::vector<double> slots(x.begin(), x.end());
  slots.reserve(dim() + lets_.size());
  Eval ev{tables_, slots, grid, half_texel_};
  for (const auto& e : lets_) slots.push_back(ev(*e));
  return ev(*out_);
}

}  // namespace fastspline
