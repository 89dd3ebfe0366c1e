#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fastspline/fastspline.h>

#include <cstdio>
#include <cstring>
#include <string>

#include "doctest.h"

namespace {

fs_plan* compile(const char* name, int grouped) {
  fs_spline* s = nullptr;
  REQUIRE(fs_spline_open(name, nullptr, &s) == FS_OK);
  fs_plan_options o;
  fs_plan_options_default(&o);
  o.grouped = grouped;
  fs_plan* p = nullptr;
  REQUIRE(fs_plan_compile(s, &o, &p) == FS_OK);
  fs_spline_free(s);
  return p;
}

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(fs_status_name(FS_OK)) == "ok");
  CHECK(std::strlen(fs_version()) > 0);
  fs_spline* s = nullptr;
  CHECK(fs_spline_open("no-such-spline", nullptr, &s) == FS_ERR_INVALID_ARGUMENT);
  CHECK(s == nullptr);
  CHECK(std::strlen(fs_last_error()) > 0);
  CHECK(fs_spline_open(nullptr, nullptr, &s) == FS_ERR_INVALID_ARGUMENT);
  fs_plan* p = nullptr;
  CHECK(fs_plan_from_json("{", &p) == FS_ERR_PARSE);
  CHECK(fs_plan_load("/nonexistent/plan.json", &p) == FS_ERR_IO);
  fs_spline_free(nullptr);
  fs_plan_free(nullptr);
  fs_grid_free(nullptr);
  fs_kernel_free(nullptr);
  fs_string_free(nullptr);
}

TEST_CASE("corpus listing") {
  CHECK(fs_corpus_size() >= 9);
  const char* name = nullptr;
  REQUIRE(fs_corpus_name(0, &name) == FS_OK);
  CHECK(std::string(name) == "tp2");
  CHECK(fs_corpus_name(1000, &name) == FS_ERR_INVALID_ARGUMENT);
  fs_spline* s = nullptr;
  REQUIRE(fs_spline_from_corpus("bcc-linear-rd", nullptr, &s) == FS_OK);
  fs_spline_info info;
  REQUIRE(fs_spline_get_info(s, &info) == FS_OK);
  CHECK(info.dim == 3);
  CHECK(info.cosets == 2);
  CHECK(info.nonnegative == 1);
  fs_spline_free(s);
}

TEST_CASE("compile, evaluate and compare") {
  fs_plan* p = compile("zp", 1);
  fs_plan_info info;
  REQUIRE(fs_plan_get_info(p, &info) == FS_OK);
  CHECK(info.dim == 2);
  CHECK(info.planes == 2);
  CHECK(info.scheduled_fetches == 4);
  int64_t extent[2] = {10, 10}, origin[2] = {-5, -5};
  fs_grid* g = nullptr;
  REQUIRE(fs_grid_create(p, extent, origin, FS_BOUNDARY_ZERO, &g) == FS_OK);
  REQUIRE(fs_grid_fill_constant(g, 1.0) == FS_OK);
  double x[2] = {0.3, -1.7}, v = 0;
  REQUIRE(fs_plan_eval(p, g, x, &v) == FS_OK);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  REQUIRE(fs_grid_fill_uniform(g, 3, -1, 1) == FS_OK);
  fs_spline* s = nullptr;
  REQUIRE(fs_spline_open("zp", nullptr, &s) == FS_OK);
  double b = 0;
  REQUIRE(fs_plan_eval(p, g, x, &v) == FS_OK);
  REQUIRE(fs_bruteforce_eval(s, g, x, &b) == FS_OK);
  CHECK(v == doctest::Approx(b).epsilon(1e-12));

  const char* xr[2] = {"1/3", "-7/4"};
  char* a = nullptr;
  char* e = nullptr;
  REQUIRE(fs_plan_eval_exact(p, g, xr, &a) == FS_OK);
  REQUIRE(fs_bruteforce_eval_exact(s, g, xr, &e) == FS_OK);
  CHECK(std::string(a) == std::string(e));
  fs_string_free(a);
  fs_string_free(e);
  const char* bad[2] = {"1/0", "x"};
  CHECK(fs_plan_eval_exact(p, g, bad, &a) != FS_OK);

  double* data = nullptr;
  size_t count = 0;
  REQUIRE(fs_grid_data(g, 0, &data, &count) == FS_OK);
  CHECK(count == 100);
  CHECK(fs_grid_data(g, 1, &data, &count) == FS_ERR_INVALID_ARGUMENT);

  fs_grid_free(g);
  fs_spline_free(s);
  fs_plan_free(p);
}

TEST_CASE("plan round trip through text and files") {
  fs_plan* p = compile("bcc-linear-rd", 1);
  char* json = nullptr;
  REQUIRE(fs_plan_to_json(p, &json) == FS_OK);
  fs_plan* q = nullptr;
  REQUIRE(fs_plan_from_json(json, &q) == FS_OK);
  int equal = 0;
  REQUIRE(fs_plan_equal(p, q, &equal) == FS_OK);
  CHECK(equal == 1);
  std::string tampered = json;
  tampered.replace(tampered.find("\"sigma\""), 7, "\"sigmb\"");
  fs_plan* r = nullptr;
  CHECK(fs_plan_from_json(tampered.c_str(), &r) == FS_ERR_CHECKSUM);
  fs_string_free(json);

  const char* path = "fastspline_capi_plan.json";
  REQUIRE(fs_plan_save(p, path) == FS_OK);
  fs_plan* loaded = nullptr;
  REQUIRE(fs_plan_load(path, &loaded) == FS_OK);
  std::remove(path);
  REQUIRE(fs_plan_equal(p, loaded, &equal) == FS_OK);
  CHECK(equal == 1);

  char* report = nullptr;
  REQUIRE(fs_plan_report(p, &report) == FS_OK);
  CHECK(std::string(report).find("Q\t6") != std::string::npos);
  fs_string_free(report);
  fs_plan_free(loaded);
  fs_plan_free(q);
  fs_plan_free(p);
}

TEST_CASE("emitted kernels run through the API") {
  fs_plan* p = compile("tp2", 1);
  char* text = nullptr;
  REQUIRE(fs_plan_emit_kernel(p, &text) == FS_OK);
  fs_kernel* k = nullptr;
  REQUIRE(fs_kernel_parse(text, &k) == FS_OK);
  fs_string_free(text);
  int64_t extent[2] = {8, 8}, origin[2] = {-4, -4};
  fs_grid* g = nullptr;
  REQUIRE(fs_grid_create(p, extent, origin, FS_BOUNDARY_MIRROR, &g) == FS_OK);
  REQUIRE(fs_grid_fill_uniform(g, 9, 0, 1) == FS_OK);
  for (int n = 0; n < 50; ++n) {
    double x[2] = {-3.0 + 0.123 * n, 2.5 - 0.097 * n}, a = 0, b = 0;
    REQUIRE(fs_plan_eval(p, g, x, &a) == FS_OK);
    REQUIRE(fs_kernel_eval(k, g, x, &b) == FS_OK);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
  CHECK(fs_kernel_parse("garbage", &k) == FS_ERR_PARSE);

  const char* path = "fastspline_capi_volume.bin";
  REQUIRE(fs_grid_save(g, path) == FS_OK);
  fs_grid* back = nullptr;
  REQUIRE(fs_grid_load(path, &back) == FS_OK);
  std::remove(path);
  double x[2] = {0.25, 0.75}, a = 0, b = 0;
  REQUIRE(fs_plan_eval(p, g, x, &a) == FS_OK);
  REQUIRE(fs_plan_eval(p, back, x, &b) == FS_OK);
  CHECK(a == b);
  fs_grid_free(back);
  fs_grid_free(g);
  fs_kernel_free(k);
  fs_plan_free(p);
}

TEST_CASE("harnesses through the API") {
  fs_spline* s = nullptr;
  REQUIRE(fs_spline_open("tp2", nullptr, &s) == FS_OK);
  fs_plan* p = compile("tp2", 0);
  fs_convergence_options co;
  fs_convergence_options_default(&co);
  co.halvings = 2;
  co.samples = 1000;
  char* report = nullptr;
  double order = 0;
  int expected = 0;
  REQUIRE(fs_convergence_run(s, p, &co, &report, &order, &expected) == FS_OK);
  CHECK(expected == 2);
  CHECK(order > 1.5);
  CHECK(std::string(report).find("fitted_order") != std::string::npos);
  fs_string_free(report);
  fs_plan_free(p);
  fs_spline_free(s);

  fs_plan* cc = compile("cc-trilinear", 1);
  fs_render_options ro;
  fs_render_options_default(&ro);
  ro.volume_size = 12;
  ro.width = ro.height = 16;
  unsigned char* ppm = nullptr;
  size_t size = 0;
  double ms = 0;
  REQUIRE(fs_render_marschner_lobb(cc, &ro, &ppm, &size, &ms) == FS_OK);
  CHECK(size == std::strlen("P6\n16 16\n255\n") + 16 * 16 * 3);
  CHECK(std::memcmp(ppm, "P6", 2) == 0);
  fs_bytes_free(ppm);
  fs_plan* tp = compile("tp2", 0);
  CHECK(fs_render_marschner_lobb(tp, &ro, &ppm, &size, &ms) == FS_ERR_INVALID_ARGUMENT);
  fs_plan_free(tp);
  fs_plan_free(cc);
}
