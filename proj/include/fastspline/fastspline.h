#ifndef FASTSPLINE_FASTSPLINE_H
#define FASTSPLINE_FASTSPLINE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FS_API __declspec(dllexport)
#else
#define FS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fs_status {
  FS_OK = 0,
  FS_ERR_INVALID_ARGUMENT = 1,
  FS_ERR_PARSE = 2,
  FS_ERR_VALIDATION = 3,
  FS_ERR_CHECKSUM = 4,
  FS_ERR_VERSION = 5,
  FS_ERR_MISMATCH = 6,
  FS_ERR_BUDGET = 7,
  FS_ERR_IO = 8,
  FS_ERR_INTERNAL = 9
} fs_status;

typedef enum fs_boundary { FS_BOUNDARY_ZERO = 0, FS_BOUNDARY_CLAMP = 1, FS_BOUNDARY_MIRROR = 2 } fs_boundary;

/* A piecewise-polynomial basis function placed on a lattice. */
typedef struct fs_spline fs_spline;
/* A compiled evaluation plan together with its interpreter. */
typedef struct fs_plan fs_plan;
/* Coset-split coefficient memory. */
typedef struct fs_grid fs_grid;
/* A parsed kernel program in the fastspline-kernel language. */
typedef struct fs_kernel fs_kernel;

FS_API const char* fs_version(void);
FS_API const char* fs_status_name(fs_status status);
/* Message of the last failure on the calling thread; never NULL. */
FS_API const char* fs_last_error(void);
/* Strings returned through char** out-parameters are freed with this. */
FS_API void fs_string_free(char* s);

/* ---- splines ---- */

FS_API size_t fs_corpus_size(void);
/* Name of corpus entry i; the pointer stays valid for the process. */
FS_API fs_status fs_corpus_name(size_t i, const char** name);
/* lattice may be NULL for the entry's own lattice. */
FS_API fs_status fs_spline_from_corpus(const char* name, const char* lattice, fs_spline** out);
/* spline: a corpus name or a spline-description file. lattice: a lattice
   name (CC2, CC3, QC, BCC, FCC, D4, ...) or a lattice file. */
FS_API fs_status fs_spline_open(const char* spline, const char* lattice, fs_spline** out);
FS_API void fs_spline_free(fs_spline* s);

typedef struct fs_spline_info {
  size_t dim;
  size_t pieces;
  int degree;
  int nonnegative;
  size_t cosets;
  int order; /* approximation order when known, else 0 */
} fs_spline_info;
FS_API fs_status fs_spline_get_info(const fs_spline* s, fs_spline_info* out);
/* Spline description text (the file format fs_spline_open reads). */
FS_API fs_status fs_spline_export(const fs_spline* s, char** text);

/* ---- plans ---- */

typedef struct fs_plan_options {
  int grouped;     /* linear-fetch grouping */
  int predication; /* evaluate every kernel and select */
  int half_texel;  /* texel centres at m + 1/2 */
  int fold;        /* octant folding when the spline allows it */
  int symmetry;    /* signed-permutation symmetry search */
} fs_plan_options;

FS_API void fs_plan_options_default(fs_plan_options* opts);
FS_API fs_status fs_plan_compile(const fs_spline* s, const fs_plan_options* opts, fs_plan** out);
FS_API fs_status fs_plan_from_json(const char* text, fs_plan** out);
FS_API fs_status fs_plan_load(const char* path, fs_plan** out);
FS_API fs_status fs_plan_to_json(const fs_plan* p, char** text);
FS_API fs_status fs_plan_save(const fs_plan* p, const char* path);
FS_API void fs_plan_free(fs_plan* p);

typedef struct fs_plan_info {
  size_t dim;
  size_t cosets;      /* M */
  size_t subregions;  /* N */
  size_t classes;
  size_t planes;      /* Q */
  size_t r;
  size_t kernels;     /* K */
  size_t nearest_fetches;
  size_t scheduled_fetches;
  int grouped;
  int predication;
  int fold;
} fs_plan_info;
FS_API fs_status fs_plan_get_info(const fs_plan* p, fs_plan_info* out);
/* Tab-separated report: header, planes, transforms, kernels. */
FS_API fs_status fs_plan_report(const fs_plan* p, char** text);
FS_API fs_status fs_plan_emit_kernel(const fs_plan* p, char** text);
/* Structural equality of two plans. */
FS_API fs_status fs_plan_equal(const fs_plan* a, const fs_plan* b, int* equal);

/* ---- coefficient grids ---- */

/* extent and origin hold dim entries each; cells origin .. origin+extent-1
   of every coset. */
FS_API fs_status fs_grid_create(const fs_plan* p, const int64_t* extent, const int64_t* origin, fs_boundary policy,
                                fs_grid** out);
FS_API fs_status fs_grid_load(const char* path, fs_grid** out);
FS_API fs_status fs_grid_save(const fs_grid* g, const char* path);
FS_API void fs_grid_free(fs_grid* g);
FS_API fs_status fs_grid_set_policy(fs_grid* g, fs_boundary policy);
/* Direct access to a coset's storage (axis 0 fastest). */
FS_API fs_status fs_grid_data(fs_grid* g, size_t coset, double** data, size_t* count);
FS_API fs_status fs_grid_fill_uniform(fs_grid* g, uint64_t seed, double lo, double hi);
FS_API fs_status fs_grid_fill_constant(fs_grid* g, double value);

/* ---- evaluation ---- */

FS_API fs_status fs_plan_eval(const fs_plan* p, const fs_grid* g, const double* x, double* out);
/* Rational debug mode. x holds dim "num/den" strings; *out is a "num/den"
   string. */
FS_API fs_status fs_plan_eval_exact(const fs_plan* p, const fs_grid* g, const char* const* x, char** out);
/* Unoptimized convolution sum over every lattice site. */
FS_API fs_status fs_bruteforce_eval(const fs_spline* s, const fs_grid* g, const double* x, double* out);
FS_API fs_status fs_bruteforce_eval_exact(const fs_spline* s, const fs_grid* g, const char* const* x, char** out);

FS_API fs_status fs_kernel_parse(const char* text, fs_kernel** out);
FS_API fs_status fs_kernel_eval(const fs_kernel* k, const fs_grid* g, const double* x, double* out);
FS_API void fs_kernel_free(fs_kernel* k);

/* ---- harnesses ---- */

typedef struct fs_convergence_options {
  int halvings;
  size_t samples;
  double h0;         /* 0 picks 0.125 / |det L|^(1/s) */
  double sigma;      /* Gaussian target width */
  double half_width; /* error measured on [-a, a]^s */
  uint64_t seed;
  size_t site_budget;
  unsigned threads;
  const char* prefilter; /* "builtin", "identity" or a tap file */
} fs_convergence_options;

FS_API void fs_convergence_options_default(fs_convergence_options* opts);
/* report: TSV with one row per scale. */
FS_API fs_status fs_convergence_run(const fs_spline* s, const fs_plan* p, const fs_convergence_options* opts,
                                    char** report, double* fitted_order, int* expected_order);

typedef struct fs_render_options {
  int volume_size; /* Cartesian-equivalent samples per axis */
  int width, height;
  double step;
  double fm, alpha; /* Marschner-Lobb parameters */
  double view_direction[3];
  double view_width;
  unsigned threads;
} fs_render_options;

FS_API void fs_render_options_default(fs_render_options* opts);
/* Samples Marschner-Lobb on the plan's lattice and raycasts it. The image is
   returned as binary PPM bytes; *ms receives the raycast time. */
FS_API fs_status fs_render_marschner_lobb(const fs_plan* p, const fs_render_options* opts, unsigned char** ppm,
                                          size_t* size, double* ms);
/* Raycasts a stored volume; h is the world size of one lattice unit and the
   volume's site 0 sits at world (-1, -1, -1). */
FS_API fs_status fs_render_grid(const fs_plan* p, const fs_grid* g, double h, const fs_render_options* opts,
                                unsigned char** ppm, size_t* size, double* ms);
FS_API void fs_bytes_free(unsigned char* bytes);

#ifdef __cplusplus
}
#endif

#endif
