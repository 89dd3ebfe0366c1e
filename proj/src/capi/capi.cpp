#include "fastspline/fastspline.h"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "harness/convergence.hpp"
#include "harness/numeric.hpp"
#include "harness/render.hpp"
#include "plancompile/emit.hpp"
#include "plancompile/planio.hpp"
#include "runtime/interpreter.hpp"
#include "runtime/kernel_lang.hpp"
#include "spline/corpus.hpp"

using namespace fastspline;

struct fs_spline {
  SplineOnLattice sol;
  int order = 0;
};

struct fs_plan {
  EvaluationPlan plan;
  PlanInterpreter interp;
  explicit fs_plan(EvaluationPlan p) : plan(p), interp(std::move(p)) {}
};

struct fs_grid {
  CoefficientGrid grid;
};

struct fs_kernel {
  KernelProgram program;
};

namespace {

thread_local std::string last_error;

fs_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return FS_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return FS_ERR_PARSE;
    case ErrorKind::Validation: return FS_ERR_VALIDATION;
    case ErrorKind::Checksum: return FS_ERR_CHECKSUM;
    case ErrorKind::Version: return FS_ERR_VERSION;
    case ErrorKind::Mismatch: return FS_ERR_MISMATCH;
    case ErrorKind::Budget: return FS_ERR_BUDGET;
    case ErrorKind::Io: return FS_ERR_IO;
    case ErrorKind::Internal: return FS_ERR_INTERNAL;
  }
  return FS_ERR_INTERNAL;
}

template <class F>
fs_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return FS_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return FS_ERR_BUDGET;
  } catch (const std::exception& e) {
    last_error = e.what();
    return FS_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorKind::InvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << data;
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

BoundaryPolicy policy_of(fs_boundary b) {
  switch (b) {
    case FS_BOUNDARY_ZERO: return BoundaryPolicy::Zero;
    case FS_BOUNDARY_CLAMP: return BoundaryPolicy::Clamp;
    case FS_BOUNDARY_MIRROR: return BoundaryPolicy::Mirror;
  }
  fail(ErrorKind::InvalidArgument, "unknown boundary policy");
}

IntegerLattice lattice_from_arg(const std::string& arg, std::size_t dim) {
  if (std::filesystem::is_regular_file(arg)) return parse_lattice(read_file(arg), std::filesystem::path(arg).stem());
  return named_lattice(arg, dim);
}

RationalVector rational_point(const char* const* x, std::size_t dim) {
  need(x, "point");
  RationalVector v;
  for (std::size_t i = 0; i < dim; ++i) {
    need(x[i], "coordinate");
    v.push_back(parse_rational(x[i]));
  }
  return v;
}

void check_dims(const fs_plan* p, const fs_grid* g) {
  need(p, "plan");
  need(g, "grid");
  p->interp.check_grid(g->grid);
}

RenderJob render_job(const fs_plan* p, const fs_render_options* opts) {
  RenderJob job;
  job.plan = &p->plan;
  if (opts) {
    job.width = opts->width;
    job.height = opts->height;
    job.step = opts->step;
    job.camera.direction = {opts->view_direction[0], opts->view_direction[1], opts->view_direction[2]};
    job.camera.width = opts->view_width;
    job.threads = opts->threads;
  }
  return job;
}

void hand_out_image(const Image& img, unsigned char** ppm, std::size_t* size) {
  std::string data = img.to_ppm();
  auto* out = static_cast<unsigned char*>(std::malloc(data.size()));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, data.data(), data.size());
  *ppm = out;
  *size = data.size();
}

}  // namespace

extern "C" {

FS_API const char* fs_version(void) { return "1.0.0"; }

FS_API const char* fs_status_name(fs_status status) {
  switch (status) {
    case FS_OK: return "ok";
    case FS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FS_ERR_PARSE: return "parse error";
    case FS_ERR_VALIDATION: return "validation error";
    case FS_ERR_CHECKSUM: return "checksum mismatch";
    case FS_ERR_VERSION: return "version mismatch";
    case FS_ERR_MISMATCH: return "layout mismatch";
    case FS_ERR_BUDGET: return "budget exceeded";
    case FS_ERR_IO: return "i/o error";
    case FS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

FS_API const char* fs_last_error(void) { return last_error.c_str(); }

FS_API void fs_string_free(char* s) { std::free(s); }
FS_API void fs_bytes_free(unsigned char* bytes) { std::free(bytes); }

FS_API size_t fs_corpus_size(void) { return spline_corpus().size(); }

FS_API fs_status fs_corpus_name(size_t i, const char** name) {
  return guarded([&] {
    need(name, "name");
    if (i >= spline_corpus().size()) fail(ErrorKind::InvalidArgument, "corpus index out of range");
    *name = spline_corpus()[i].name.c_str();
  });
}

FS_API fs_status fs_spline_from_corpus(const char* name, const char* lattice, fs_spline** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const CorpusEntry& e = corpus_entry(name);
    auto s = std::make_unique<fs_spline>();
    s->sol = corpus_spline_on_lattice(name, lattice ? lattice : "");
    s->order = e.order;
    *out = s.release();
  });
}

FS_API fs_status fs_spline_open(const char* spline, const char* lattice, fs_spline** out) {
  return guarded([&] {
    need(spline, "spline");
    need(out, "out");
    std::string name = spline;
    bool corpus = false;
    for (const auto& e : spline_corpus()) corpus = corpus || e.name == name;
    auto s = std::make_unique<fs_spline>();
    if (corpus && !std::filesystem::is_regular_file(name)) {
      const CorpusEntry& e = corpus_entry(name);
      PiecewisePolySpline pp = corpus_spline(e);
      std::string lat = lattice ? lattice : e.lattice;
      s->sol = make_spline_on_lattice(std::move(pp), lattice_from_arg(lat, e.directions.front().size()));
      s->order = e.order;
    } else {
      if (!lattice) fail(ErrorKind::InvalidArgument, "a spline file needs a lattice");
      PiecewisePolySpline pp = import_pp_spline(read_file(name));
      std::size_t dim = pp.dim();
      s->sol = make_spline_on_lattice(std::move(pp), lattice_from_arg(lattice, dim));
    }
    *out = s.release();
  });
}

FS_API void fs_spline_free(fs_spline* s) { delete s; }

FS_API fs_status fs_spline_get_info(const fs_spline* s, fs_spline_info* out) {
  return guarded([&] {
    need(s, "spline");
    need(out, "out");
    out->dim = s->sol.spline.dim();
    out->pieces = s->sol.spline.pieces().size();
    out->degree = s->sol.spline.degree_bound();
    out->nonnegative = s->sol.spline.nonnegative() ? 1 : 0;
    out->cosets = s->sol.cosets.size();
    out->order = s->order;
  });
}

FS_API fs_status fs_spline_export(const fs_spline* s, char** text) {
  return guarded([&] {
    need(s, "spline");
    need(text, "text");
    *text = dup_string(export_pp_spline(s->sol.spline));
  });
}

FS_API void fs_plan_options_default(fs_plan_options* opts) {
  if (!opts) return;
  PlanOptions d;
  opts->grouped = d.grouped;
  opts->predication = d.predication;
  opts->half_texel = d.half_texel;
  opts->fold = d.fold;
  opts->symmetry = d.symmetry;
}

FS_API fs_status fs_plan_compile(const fs_spline* s, const fs_plan_options* opts, fs_plan** out) {
  return guarded([&] {
    need(s, "spline");
    need(out, "out");
    PlanOptions o;
    if (opts) {
      o.grouped = opts->grouped != 0;
      o.predication = opts->predication != 0;
      o.half_texel = opts->half_texel != 0;
      o.fold = opts->fold != 0;
      o.symmetry = opts->symmetry != 0;
    }
    *out = new fs_plan(compile_plan(s->sol, o));
  });
}

FS_API fs_status fs_plan_from_json(const char* text, fs_plan** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new fs_plan(deserialize_plan(text));
  });
}

FS_API fs_status fs_plan_load(const char* path, fs_plan** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new fs_plan(deserialize_plan(read_file(path)));
  });
}

FS_API fs_status fs_plan_to_json(const fs_plan* p, char** text) {
  return guarded([&] {
    need(p, "plan");
    need(text, "text");
    *text = dup_string(serialize_plan(p->plan));
  });
}

FS_API fs_status fs_plan_save(const fs_plan* p, const char* path) {
  return guarded([&] {
    need(p, "plan");
    need(path, "path");
    write_file(path, serialize_plan(p->plan));
  });
}

FS_API void fs_plan_free(fs_plan* p) { delete p; }

FS_API fs_status fs_plan_get_info(const fs_plan* p, fs_plan_info* out) {
  return guarded([&] {
    need(p, "plan");
    need(out, "out");
    const EvaluationPlan& e = p->plan;
    out->dim = e.dim;
    out->cosets = e.coset_count();
    out->subregions = e.subregions.size();
    out->classes = e.classes;
    out->planes = e.planes.size();
    out->r = e.r;
    out->kernels = e.kernels.size();
    out->nearest_fetches = e.nearest_fetches();
    out->scheduled_fetches = e.scheduled_fetches();
    out->grouped = e.options.grouped;
    out->predication = e.options.predication;
    out->fold = e.fold;
  });
}

FS_API fs_status fs_plan_report(const fs_plan* p, char** text) {
  return guarded([&] {
    need(p, "plan");
    need(text, "text");
    const EvaluationPlan& e = p->plan;
    std::ostringstream o;
    o << "key\tvalue\n";
    o << "spline\t" << e.spline << "\nlattice\t" << e.lattice << "\ns\t" << e.dim << "\nM\t" << e.coset_count()
      << "\nN\t" << e.subregions.size() << "\nclasses\t" << e.classes << "\nQ\t" << e.planes.size() << "\nr\t" << e.r
      << "\nK\t" << e.kernels.size() << "\nfold\t" << (e.fold ? "on" : "off") << "\ngrouped\t"
      << (e.options.grouped ? "on" : "off") << "\npredication\t" << (e.options.predication ? "on" : "off")
      << "\nhalf_texel\t" << (e.options.half_texel ? "on" : "off") << "\nnearest_fetches\t" << e.nearest_fetches()
      << "\nscheduled_fetches\t" << e.scheduled_fetches() << "\n\n";
    o << "plane\tnormal\toffset\n";
    for (std::size_t i = 0; i < e.planes.size(); ++i)
      o << i << "\t" << to_string(e.planes[i].normal) << "\t" << to_string(e.planes[i].offset) << "\n";
    o << "\nsubregion\tkernel\tclass\tA\tb\n";
    for (std::size_t j = 0; j < e.subregions.size(); ++j) {
      const auto& sr = e.subregions[j];
      o << j << "\t" << sr.kernel << "\t" << sr.class_id << "\t[";
      for (std::size_t r = 0; r < sr.a.rows(); ++r) o << (r ? " " : "") << to_string(sr.a.row(r));
      o << "]\t" << to_string(sr.b) << "\n";
    }
    o << "\nkernel\treference\tsites\tnearest\tgrouped\tgroup_sizes\tordering_cost\n";
    for (std::size_t k = 0; k < e.kernels.size(); ++k) {
      const auto& pk = e.kernels[k];
      o << k << "\t" << pk.reference << "\t" << pk.sites.size() << "\t" << pk.sites.size() * e.coset_count() << "\t"
        << pk.schedule.size() * e.coset_count() << "\t";
      for (std::size_t g = 0; g < pk.schedule.size(); ++g) o << (g ? "," : "") << pk.schedule[g].members.size();
      o << "\t" << pk.ordering_cost << "\n";
    }
    *text = dup_string(o.str());
  });
}

FS_API fs_status fs_plan_emit_kernel(const fs_plan* p, char** text) {
  return guarded([&] {
    need(p, "plan");
    need(text, "text");
    *text = dup_string(emit_kernel(p->plan));
  });
}

FS_API fs_status fs_plan_equal(const fs_plan* a, const fs_plan* b, int* equal) {
  return guarded([&] {
    need(a, "plan");
    need(b, "plan");
    need(equal, "equal");
    *equal = a->plan == b->plan ? 1 : 0;
  });
}

FS_API fs_status fs_grid_create(const fs_plan* p, const int64_t* extent, const int64_t* origin, fs_boundary policy,
                                fs_grid** out) {
  return guarded([&] {
    need(p, "plan");
    need(extent, "extent");
    need(out, "out");
    std::size_t s = p->plan.dim;
    IntVector ext(extent, extent + s), org(s, 0);
    if (origin) org.assign(origin, origin + s);
    auto g = std::make_unique<fs_grid>();
    g->grid = CoefficientGrid(p->plan.diagonal, p->plan.coset_shifts, ext, org, policy_of(policy));
    *out = g.release();
  });
}

FS_API fs_status fs_grid_load(const char* path, fs_grid** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto g = std::make_unique<fs_grid>();
    g->grid = load_grid(path);
    *out = g.release();
  });
}

FS_API fs_status fs_grid_save(const fs_grid* g, const char* path) {
  return guarded([&] {
    need(g, "grid");
    need(path, "path");
    save_grid(g->grid, path);
  });
}

FS_API void fs_grid_free(fs_grid* g) { delete g; }

FS_API fs_status fs_grid_set_policy(fs_grid* g, fs_boundary policy) {
  return guarded([&] {
    need(g, "grid");
    g->grid.set_policy(policy_of(policy));
  });
}

FS_API fs_status fs_grid_data(fs_grid* g, size_t coset, double** data, size_t* count) {
  return guarded([&] {
    need(g, "grid");
    need(data, "data");
    need(count, "count");
    if (coset >= g->grid.coset_count()) fail(ErrorKind::InvalidArgument, "coset index out of range");
    *data = g->grid.coset(coset).data();
    *count = g->grid.coset(coset).size();
  });
}

FS_API fs_status fs_grid_fill_uniform(fs_grid* g, uint64_t seed, double lo, double hi) {
  return guarded([&] {
    need(g, "grid");
    std::uint64_t n = 0;
    for (std::size_t k = 0; k < g->grid.coset_count(); ++k)
      for (double& v : g->grid.coset(k)) v = lo + (hi - lo) * counter_uniform(seed, n++);
  });
}

FS_API fs_status fs_grid_fill_constant(fs_grid* g, double value) {
  return guarded([&] {
    need(g, "grid");
    for (std::size_t k = 0; k < g->grid.coset_count(); ++k)
      for (double& v : g->grid.coset(k)) v = value;
  });
}

FS_API fs_status fs_plan_eval(const fs_plan* p, const fs_grid* g, const double* x, double* out) {
  return guarded([&] {
    check_dims(p, g);
    need(x, "x");
    need(out, "out");
    *out = p->interp.evaluate(std::span<const double>(x, p->plan.dim), g->grid);
  });
}

FS_API fs_status fs_plan_eval_exact(const fs_plan* p, const fs_grid* g, const char* const* x, char** out) {
  return guarded([&] {
    check_dims(p, g);
    need(out, "out");
    *out = dup_string(to_string(p->interp.evaluate_exact(rational_point(x, p->plan.dim), g->grid)));
  });
}

FS_API fs_status fs_bruteforce_eval(const fs_spline* s, const fs_grid* g, const double* x, double* out) {
  return guarded([&] {
    need(s, "spline");
    need(g, "grid");
    need(x, "x");
    need(out, "out");
    if (g->grid.dim() != s->sol.spline.dim()) fail(ErrorKind::Mismatch, "grid dimension does not match the spline");
    *out = eval_bruteforce(s->sol, g->grid, std::span<const double>(x, g->grid.dim()));
  });
}

FS_API fs_status fs_bruteforce_eval_exact(const fs_spline* s, const fs_grid* g, const char* const* x, char** out) {
  return guarded([&] {
    need(s, "spline");
    need(g, "grid");
    need(out, "out");
    if (g->grid.dim() != s->sol.spline.dim()) fail(ErrorKind::Mismatch, "grid dimension does not match the spline");
    *out = dup_string(to_string(eval_bruteforce_exact(s->sol, g->grid, rational_point(x, g->grid.dim()))));
  });
}

FS_API fs_status fs_kernel_parse(const char* text, fs_kernel** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new fs_kernel{KernelProgram::parse(text)};
  });
}

FS_API fs_status fs_kernel_eval(const fs_kernel* k, const fs_grid* g, const double* x, double* out) {
  return guarded([&] {
    need(k, "kernel");
    need(g, "grid");
    need(x, "x");
    need(out, "out");
    *out = k->program.evaluate(std::span<const double>(x, k->program.dim()), g->grid);
  });
}

FS_API void fs_kernel_free(fs_kernel* k) { delete k; }

FS_API void fs_convergence_options_default(fs_convergence_options* opts) {
  if (!opts) return;
  ConvergenceOptions d;
  opts->halvings = d.halvings;
  opts->samples = d.samples;
  opts->h0 = d.h0;
  opts->sigma = 0.125;
  opts->half_width = d.half_width;
  opts->seed = d.seed;
  opts->site_budget = d.site_budget;
  opts->threads = d.threads;
  opts->prefilter = "builtin";
}

FS_API fs_status fs_convergence_run(const fs_spline* s, const fs_plan* p, const fs_convergence_options* opts,
                                    char** report, double* fitted_order, int* expected_order) {
  return guarded([&] {
    need(s, "spline");
    need(p, "plan");
    fs_convergence_options o;
    fs_convergence_options_default(&o);
    if (opts) o = *opts;
    std::size_t dim = p->plan.dim;
    if (s->sol.spline.dim() != dim || s->sol.cosets.shifts() != p->plan.coset_shifts)
      fail(ErrorKind::Mismatch, "plan was not compiled for this spline's lattice");
    std::string pf = o.prefilter ? o.prefilter : "builtin";
    Prefilter prefilter = pf == "builtin"    ? builtin_prefilter(p->plan.spline, dim)
                          : pf == "identity" ? Prefilter::identity(dim)
                                             : parse_prefilter(read_file(pf), dim);
    ConvergenceOptions co;
    co.halvings = o.halvings;
    co.samples = o.samples;
    co.h0 = o.h0;
    co.seed = o.seed;
    co.half_width = o.half_width;
    co.site_budget = o.site_budget;
    co.threads = o.threads;
    ConvergenceReport rep = run_convergence(s->sol, p->plan, gaussian_target(o.sigma), prefilter, co);
    if (rep.expected_order == 0) rep.expected_order = s->order;
    if (report) {
      std::ostringstream t;
      t.precision(9);
      t << "# spline=" << rep.spline << " lattice=" << rep.lattice << " samples=" << rep.samples
        << " seed=" << rep.seed << " prefilter=" << (prefilter.is_identity() ? "identity" : pf) << "\n";
      t << "h\tl2_error\tsites\tratio\n";
      for (std::size_t i = 0; i < rep.scales.size(); ++i) {
        t << rep.scales[i] << "\t" << rep.errors[i] << "\t" << rep.sites[i] << "\t";
        if (i == 0) t << "-";
        else t << rep.errors[i - 1] / rep.errors[i];
        t << "\n";
      }
      t << "# fitted_order=" << rep.fitted_order << " expected_order=" << rep.expected_order << "\n";
      *report = dup_string(t.str());
    }
    if (fitted_order) *fitted_order = rep.fitted_order;
    if (expected_order) *expected_order = rep.expected_order;
  });
}

FS_API void fs_render_options_default(fs_render_options* opts) {
  if (!opts) return;
  RenderJob d;
  opts->volume_size = 64;
  opts->width = d.width;
  opts->height = d.height;
  opts->step = d.step;
  opts->fm = 6.0;
  opts->alpha = 0.25;
  for (int i = 0; i < 3; ++i) opts->view_direction[i] = d.camera.direction[i];
  opts->view_width = d.camera.width;
  opts->threads = d.threads;
}

FS_API fs_status fs_render_marschner_lobb(const fs_plan* p, const fs_render_options* opts, unsigned char** ppm,
                                          size_t* size, double* ms) {
  return guarded([&] {
    need(p, "plan");
    need(ppm, "ppm");
    need(size, "size");
    fs_render_options o;
    fs_render_options_default(&o);
    if (opts) o = *opts;
    if (p->plan.dim != 3) fail(ErrorKind::InvalidArgument, "rendering needs a 3D plan");
    IntegerLattice lat = named_lattice(p->plan.lattice, 3);
    SampledVolume vol = sample_marschner_lobb(p->plan, lat, o.volume_size, o.fm, o.alpha);
    RenderJob job = render_job(p, &o);
    job.volume = &vol.grid;
    job.h = vol.h;
    auto t0 = std::chrono::steady_clock::now();
    Image img = render_volume(job);
    if (ms) *ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    hand_out_image(img, ppm, size);
  });
}

FS_API fs_status fs_render_grid(const fs_plan* p, const fs_grid* g, double h, const fs_render_options* opts,
                                unsigned char** ppm, size_t* size, double* ms) {
  return guarded([&] {
    check_dims(p, g);
    need(ppm, "ppm");
    need(size, "size");
    fs_render_options o;
    fs_render_options_default(&o);
    if (opts) o = *opts;
    RenderJob job = render_job(p, &o);
    job.volume = &g->grid;
    job.h = h;
    auto t0 = std::chrono::steady_clock::now();
    Image img = render_volume(job);
    if (ms) *ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    hand_out_image(img, ppm, size);
  });
}

}  // extern "C"
