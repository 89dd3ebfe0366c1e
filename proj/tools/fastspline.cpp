// Command-line front end. Talks to the library only through the C API.
#include <fastspline/fastspline.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Failure {
  fs_status status;
};

void check(fs_status st) {
  if (st != FS_OK) throw Failure{st};
}

template <class T, void (*F)(T*)>
struct Deleter {
  void operator()(T* p) const { F(p); }
};
using Spline = std::unique_ptr<fs_spline, Deleter<fs_spline, fs_spline_free>>;
using Plan = std::unique_ptr<fs_plan, Deleter<fs_plan, fs_plan_free>>;
using Grid = std::unique_ptr<fs_grid, Deleter<fs_grid, fs_grid_free>>;
using Kernel = std::unique_ptr<fs_kernel, Deleter<fs_kernel, fs_kernel_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  fs_string_free(s);
  return out;
}

Spline open_spline(const std::string& name, const std::string& lattice) {
  fs_spline* s = nullptr;
  check(fs_spline_open(name.c_str(), lattice.empty() ? nullptr : lattice.c_str(), &s));
  return Spline(s);
}

Plan load_plan(const std::string& path) {
  fs_plan* p = nullptr;
  check(fs_plan_load(path.c_str(), &p));
  return Plan(p);
}

Plan compile(const fs_spline* s, const fs_plan_options& o) {
  fs_plan* p = nullptr;
  check(fs_plan_compile(s, &o, &p));
  return Plan(p);
}

bool on(const std::string& v) { return v == "on"; }

void write_bytes(const std::string& path, const unsigned char* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) {
    std::cerr << "fastspline: cannot write " << path << "\n";
    throw Failure{FS_ERR_IO};
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "fastspline: cannot read " << path << "\n";
    throw Failure{FS_ERR_IO};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> x;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) x.push_back(std::stod(item));
  return x;
}

struct PlanFlags {
  std::string grouped = "off", predicate = "on", fold = "off", half_texel = "off", symmetry = "on";

  void add(CLI::App* app) {
    auto onoff = CLI::IsMember({"on", "off"});
    app->add_option("--grouped", grouped, "linear-fetch grouping")->check(onoff);
    app->add_option("--predicate", predicate, "predicated kernel selection")->check(onoff);
    app->add_option("--fold", fold, "octant folding")->check(onoff);
    app->add_option("--half-texel", half_texel, "texel centres at m + 1/2")->check(onoff);
    app->add_option("--symmetry", symmetry, "symmetry search")->check(onoff);
  }
  fs_plan_options options() const {
    fs_plan_options o;
    fs_plan_options_default(&o);
    o.grouped = on(grouped);
    o.predication = on(predicate);
    o.fold = on(fold);
    o.half_texel = on(half_texel);
    o.symmetry = on(symmetry);
    return o;
  }
};

int selftest() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << name << "\t" << (ok ? "pass" : "FAIL") << "\t" << detail << "\n";
    if (!ok) ++failures;
  };
  std::cout << "check\tresult\tdetail\n";
  for (const char* name : {"tp2", "zp", "bcc-linear-rd"}) {
    Spline s = open_spline(name, "");
    for (int grouped = 0; grouped < 2; ++grouped) {
      fs_plan_options o;
      fs_plan_options_default(&o);
      o.grouped = grouped;
      Plan p = compile(s.get(), o);
      fs_plan_info info;
      check(fs_plan_get_info(p.get(), &info));
      std::vector<int64_t> extent(info.dim, 10), origin(info.dim, -5);
      fs_grid* g = nullptr;
      check(fs_grid_create(p.get(), extent.data(), origin.data(), FS_BOUNDARY_ZERO, &g));
      Grid grid(g);
      check(fs_grid_fill_uniform(grid.get(), 7, 0.5, 1.5));
      fs_kernel* k = nullptr;
      char* text = nullptr;
      check(fs_plan_emit_kernel(p.get(), &text));
      check(fs_kernel_parse(take(text).c_str(), &k));
      Kernel kernel(k);
      double worst = 0;
      bool identical = true;
      for (int n = 0; n < 200; ++n) {
        std::vector<double> x(info.dim);
        for (std::size_t i = 0; i < info.dim; ++i) x[i] = std::fmod(0.7548776662 * (n + 1) * (i + 1.3), 6.0) - 3.0;
        double a, b, c;
        check(fs_plan_eval(p.get(), grid.get(), x.data(), &a));
        check(fs_bruteforce_eval(s.get(), grid.get(), x.data(), &b));
        check(fs_kernel_eval(kernel.get(), grid.get(), x.data(), &c));
        worst = std::max(worst, std::abs(a - b) / std::max(1e-300, std::abs(b)));
        identical = identical && std::memcmp(&a, &c, sizeof a) == 0;
      }
      std::string tag = std::string(name) + (grouped ? "/grouped" : "/nearest");
      report(tag + " plan=bruteforce", worst <= 1e-9, "max_rel=" + std::to_string(worst));
      report(tag + " kernel=plan", identical, "bitwise");
      char* json = nullptr;
      check(fs_plan_to_json(p.get(), &json));
      fs_plan* back = nullptr;
      check(fs_plan_from_json(take(json).c_str(), &back));
      Plan reread(back);
      int equal = 0;
      check(fs_plan_equal(p.get(), reread.get(), &equal));
      report(tag + " json round trip", equal == 1, "");
    }
  }
  std::cout << "# " << (failures ? std::to_string(failures) + " failed" : "all passed") << "\n";
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fastspline: compile and run branch-free spline evaluation plans"};
  app.require_subcommand(1);

  auto* corpus = app.add_subcommand("corpus", "list the built-in splines");

  std::string spline, lattice, out_path;
  PlanFlags flags;
  auto* analyze = app.add_subcommand("analyze", "compile a spline on a lattice into a plan");
  analyze->add_option("--spline", spline, "corpus name or spline-description file")->required();
  analyze->add_option("--lattice", lattice, "lattice name or lattice file (default: the corpus lattice)");
  analyze->add_option("-o,--output", out_path, "plan file to write");
  flags.add(analyze);

  auto* exporter = app.add_subcommand("export", "write a spline-description file");
  exporter->add_option("--spline", spline, "corpus name")->required();
  exporter->add_option("-o,--output", out_path, "file (default: stdout)");

  std::string plan_path;
  auto* inspect = app.add_subcommand("inspect", "print a plan report");
  inspect->add_option("plan", plan_path, "plan file")->required();

  auto* emit = app.add_subcommand("emit", "emit the kernel program of a plan");
  emit->add_option("plan", plan_path, "plan file")->required();
  emit->add_option("-o,--output", out_path, "kernel file (default: stdout)");

  std::string volume_path, point, kernel_path, policy = "zero";
  auto* eval = app.add_subcommand("eval", "evaluate a plan on a volume at one point");
  eval->add_option("--plan", plan_path, "plan file")->required();
  eval->add_option("--volume", volume_path, "volume file")->required();
  eval->add_option("--point", point, "comma-separated lattice coordinates")->required();
  eval->add_option("--kernel", kernel_path, "also run this kernel program");
  eval->add_option("--boundary", policy, "zero, clamp or mirror")->check(CLI::IsMember({"zero", "clamp", "mirror"}));

  fs_convergence_options conv;
  fs_convergence_options_default(&conv);
  std::string prefilter = "builtin";
  auto* convergence = app.add_subcommand("convergence", "measure the approximation order");
  convergence->add_option("--spline", spline, "corpus name or spline-description file")->required();
  convergence->add_option("--lattice", lattice, "lattice name or lattice file");
  convergence->add_option("--prefilter", prefilter, "builtin, identity or a tap file");
  convergence->add_option("--halvings", conv.halvings, "number of times h is halved");
  convergence->add_option("--samples", conv.samples, "Monte Carlo samples per scale");
  convergence->add_option("--h0", conv.h0, "coarsest scale (0: automatic)");
  convergence->add_option("--sigma", conv.sigma, "Gaussian width");
  convergence->add_option("--seed", conv.seed, "Monte Carlo seed");
  convergence->add_option("--site-budget", conv.site_budget, "largest grid allowed");
  convergence->add_option("--threads", conv.threads, "worker threads");
  flags.add(convergence);

  fs_render_options ropt;
  fs_render_options_default(&ropt);
  double volume_h = 0;
  auto* render = app.add_subcommand("render", "raycast a Marschner-Lobb volume (or a volume file)");
  render->add_option("--plan", plan_path, "plan file (else compiled from --spline)");
  render->add_option("--spline", spline, "corpus name or spline-description file");
  render->add_option("--lattice", lattice, "lattice name or lattice file");
  render->add_option("--volume", volume_path, "volume file instead of Marschner-Lobb");
  render->add_option("--volume-h", volume_h, "world size of a lattice unit for --volume");
  render->add_option("--size", ropt.volume_size, "Cartesian-equivalent volume resolution");
  render->add_option("--width", ropt.width, "image width");
  render->add_option("--height", ropt.height, "image height");
  render->add_option("--step", ropt.step, "ray step in world units");
  render->add_option("--fm", ropt.fm, "Marschner-Lobb frequency");
  render->add_option("--alpha", ropt.alpha, "Marschner-Lobb alpha");
  render->add_option("--threads", ropt.threads, "worker threads");
  render->add_option("-o,--output", out_path, "PPM file")->required();
  flags.add(render);

  auto* self = app.add_subcommand("selftest", "quick end-to-end checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (corpus->parsed()) {
      std::cout << "name\tdim\tpieces\tdegree\torder\tcosets\n";
      for (std::size_t i = 0; i < fs_corpus_size(); ++i) {
        const char* name = nullptr;
        check(fs_corpus_name(i, &name));
        if (std::string(name) == "d4-8dir") {
          std::cout << name << "\t4\t-\t-\t-\t-\n";  // extraction takes minutes
          continue;
        }
        Spline s = open_spline(name, "");
        fs_spline_info info;
        check(fs_spline_get_info(s.get(), &info));
        std::cout << name << "\t" << info.dim << "\t" << info.pieces << "\t" << info.degree << "\t" << info.order
                  << "\t" << info.cosets << "\n";
      }
    } else if (analyze->parsed()) {
      Spline s = open_spline(spline, lattice);
      Plan p = compile(s.get(), flags.options());
      if (!out_path.empty()) check(fs_plan_save(p.get(), out_path.c_str()));
      char* text = nullptr;
      check(fs_plan_report(p.get(), &text));
      std::string rep = take(text);
      std::cout << rep.substr(0, rep.find("\n\n") + 1);
    } else if (exporter->parsed()) {
      Spline s = open_spline(spline, "");
      char* text = nullptr;
      check(fs_spline_export(s.get(), &text));
      std::string doc = take(text);
      if (out_path.empty()) std::cout << doc;
      else write_bytes(out_path, reinterpret_cast<const unsigned char*>(doc.data()), doc.size());
    } else if (inspect->parsed()) {
      Plan p = load_plan(plan_path);
      char* text = nullptr;
      check(fs_plan_report(p.get(), &text));
      std::cout << take(text);
    } else if (emit->parsed()) {
      Plan p = load_plan(plan_path);
      char* text = nullptr;
      check(fs_plan_emit_kernel(p.get(), &text));
      std::string src = take(text);
      if (out_path.empty()) std::cout << src;
      else write_bytes(out_path, reinterpret_cast<const unsigned char*>(src.data()), src.size());
    } else if (eval->parsed()) {
      Plan p = load_plan(plan_path);
      fs_grid* g = nullptr;
      check(fs_grid_load(volume_path.c_str(), &g));
      Grid grid(g);
      if (eval->count("--boundary"))
        check(fs_grid_set_policy(grid.get(), policy == "clamp"    ? FS_BOUNDARY_CLAMP
                                             : policy == "mirror" ? FS_BOUNDARY_MIRROR
                                                                  : FS_BOUNDARY_ZERO));
      std::vector<double> x = parse_point(point);
      fs_plan_info info;
      check(fs_plan_get_info(p.get(), &info));
      if (x.size() != info.dim) {
        std::cerr << "fastspline: point needs " << info.dim << " coordinates\n";
        return 2;
      }
      double v = 0;
      check(fs_plan_eval(p.get(), grid.get(), x.data(), &v));
      std::printf("source\tvalue\nplan\t%.17g\n", v);
      if (!kernel_path.empty()) {
        fs_kernel* k = nullptr;
        check(fs_kernel_parse(read_text(kernel_path).c_str(), &k));
        Kernel kernel(k);
        check(fs_kernel_eval(kernel.get(), grid.get(), x.data(), &v));
        std::printf("kernel\t%.17g\n", v);
      }
    } else if (convergence->parsed()) {
      Spline s = open_spline(spline, lattice);
      Plan p = compile(s.get(), flags.options());
      conv.prefilter = prefilter.c_str();
      char* text = nullptr;
      double order = 0;
      int expected = 0;
      check(fs_convergence_run(s.get(), p.get(), &conv, &text, &order, &expected));
      std::cout << take(text);
    } else if (render->parsed()) {
      Plan p;
      if (!plan_path.empty()) {
        p = load_plan(plan_path);
      } else if (!spline.empty()) {
        Spline s = open_spline(spline, lattice);
        p = compile(s.get(), flags.options());
      } else {
        std::cerr << "fastspline: render needs --plan or --spline\n";
        return 2;
      }
      unsigned char* ppm = nullptr;
      std::size_t size = 0;
      double ms = 0;
      if (!volume_path.empty()) {
        if (volume_h <= 0) {
          std::cerr << "fastspline: --volume needs --volume-h\n";
          return 2;
        }
        fs_grid* g = nullptr;
        check(fs_grid_load(volume_path.c_str(), &g));
        Grid grid(g);
        check(fs_render_grid(p.get(), grid.get(), volume_h, &ropt, &ppm, &size, &ms));
      } else {
        check(fs_render_marschner_lobb(p.get(), &ropt, &ppm, &size, &ms));
      }
      std::unique_ptr<unsigned char, Deleter<unsigned char, fs_bytes_free>> bytes(ppm);
      write_bytes(out_path, ppm, size);
      std::printf("image\twidth\theight\tms\n%s\t%d\t%d\t%.1f\n", out_path.c_str(), ropt.width, ropt.height, ms);
    } else if (self->parsed()) {
      return selftest();
    }
  } catch (const Failure& f) {
    std::cerr << "fastspline: " << fs_status_name(f.status);
    if (*fs_last_error()) std::cerr << ": " << fs_last_error();
    std::cerr << "\n";
    return 1;
  }
  return 0;
}
