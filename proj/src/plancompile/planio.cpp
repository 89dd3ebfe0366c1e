#include "plancompile/planio.hpp"

#include <openssl/sha.h>

#include <cstdio>
#include <json.hpp>

#include "common/error.hpp"

namespace fastspline {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  std::string out;
  char buf[3];
  for (unsigned char c : digest) {
    std::snprintf(buf, sizeof buf, "%02x", c);
    out += buf;
  }
  return out;
}

namespace {

json rational_json(const Rational& q) { return to_string(q); }

json vector_json(const RationalVector& v) {
  json out = json::array();
  for (const auto& q : v) out.push_back(rational_json(q));
  return out;
}

json matrix_json(const RationalMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r)));
  return out;
}

// Terms as [exponent, "p/q", value]; the float is informational.
json poly_json(const MultiPoly& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back(json::array({e, to_string(c), c.get_d()}));
  return {{"dim", p.dim()}, {"terms", terms}};
}

Rational rational_from(const json& j) { return parse_rational(j.get<std::string>()); }

RationalVector vector_from(const json& j) {
  RationalVector v;
  for (const auto& q : j) v.push_back(rational_from(q));
  return v;
}

RationalMatrix matrix_from(const json& j, std::size_t dim) {
  RationalMatrix m(dim, dim);
  if (j.size() != dim) fail(ErrorKind::Parse, "matrix has wrong row count");
  for (std::size_t r = 0; r < dim; ++r) {
    if (j[r].size() != dim) fail(ErrorKind::Parse, "matrix has wrong column count");
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = rational_from(j[r][c]);
  }
  return m;
}

MultiPoly poly_from(const json& j) {
  MultiPoly p(j.at("dim").get<std::size_t>());
  for (const auto& t : j.at("terms")) {
    Exponent e = t.at(0).get<Exponent>();
    if (e.size() != p.dim()) fail(ErrorKind::Parse, "exponent of wrong length");
    p.add_term(e, parse_rational(t.at(1).get<std::string>()));
  }
  return p;
}

json plan_json(const EvaluationPlan& plan) {
  json j;
  j["dim"] = plan.dim;
  j["lattice"] = plan.lattice;
  j["spline"] = plan.spline;
  j["diagonal"] = plan.diagonal;
  j["coset_shifts"] = plan.coset_shifts;
  j["classes"] = plan.classes;
  j["fold"] = plan.fold;
  j["fold_reflect"] = plan.fold_reflect;
  j["options"] = {{"grouped", plan.options.grouped},       {"predication", plan.options.predication},
                  {"half_texel", plan.options.half_texel}, {"fold", plan.options.fold},
                  {"symmetry", plan.options.symmetry}};
  json planes = json::array();
  for (const auto& h : plan.planes) planes.push_back({{"normal", vector_json(h.normal)}, {"offset", rational_json(h.offset)}});
  j["planes"] = planes;
  j["r"] = plan.r;
  j["sigma"] = plan.sigma;
  json subs = json::array();
  for (const auto& sr : plan.subregions)
    subs.push_back({{"kernel", sr.kernel},
                    {"class", sr.class_id},
                    {"a", matrix_json(sr.a)},
                    {"b", vector_json(sr.b)},
                    {"site_map", sr.site_map}});
  j["subregions"] = subs;
  json kernels = json::array();
  for (const auto& k : plan.kernels) {
    json weights = json::array();
    for (const auto& w : k.weights) weights.push_back(poly_json(w));
    json schedule = json::array();
    for (const auto& g : k.schedule) schedule.push_back({{"members", g.members}, {"axes", g.axes}});
    kernels.push_back({{"reference", k.reference},
                       {"sites", k.sites},
                       {"weights", weights},
                       {"schedule", schedule},
                       {"ordering_cost", k.ordering_cost}});
  }
  j["kernels"] = kernels;
  return j;
}

void check(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::Validation, "plan: " + what);
}

EvaluationPlan plan_from(const json& j) {
  EvaluationPlan plan;
  plan.dim = j.at("dim").get<std::size_t>();
  plan.lattice = j.at("lattice").get<std::string>();
  plan.spline = j.at("spline").get<std::string>();
  plan.diagonal = j.at("diagonal").get<IntVector>();
  plan.coset_shifts = j.at("coset_shifts").get<std::vector<IntVector>>();
  plan.classes = j.at("classes").get<std::size_t>();
  plan.fold = j.at("fold").get<bool>();
  plan.fold_reflect = j.at("fold_reflect").get<IntVector>();
  const json& o = j.at("options");
  plan.options.grouped = o.at("grouped").get<bool>();
  plan.options.predication = o.at("predication").get<bool>();
  plan.options.half_texel = o.at("half_texel").get<bool>();
  plan.options.fold = o.at("fold").get<bool>();
  plan.options.symmetry = o.at("symmetry").get<bool>();
  for (const auto& h : j.at("planes")) plan.planes.push_back({vector_from(h.at("normal")), rational_from(h.at("offset"))});
  plan.r = j.at("r").get<std::size_t>();
  plan.sigma = j.at("sigma").get<std::vector<long long>>();
  for (const auto& s : j.at("subregions"))
    plan.subregions.push_back({s.at("kernel").get<std::size_t>(), s.at("class").get<std::size_t>(),
                               matrix_from(s.at("a"), plan.dim), vector_from(s.at("b")),
                               s.at("site_map").get<std::vector<IntVector>>()});
  for (const auto& kj : j.at("kernels")) {
    PlanKernel k;
    k.reference = kj.at("reference").get<std::size_t>();
    k.sites = kj.at("sites").get<std::vector<IntVector>>();
    for (const auto& w : kj.at("weights")) k.weights.push_back(poly_from(w));
    for (const auto& gj : kj.at("schedule")) {
      FetchGroup g;
      g.members = gj.at("members").get<std::vector<std::size_t>>();
      g.axes = gj.at("axes").get<std::vector<int>>();
      for (std::size_t m : g.members) check(m < k.weights.size(), "group member out of range");
      check(g.members.size() == (std::size_t{1} << g.axes.size()), "group size does not match its axes");
      fill_group_polys(g, k.weights);
      k.schedule.push_back(std::move(g));
    }
    k.ordering_cost = kj.at("ordering_cost").get<std::size_t>();
    plan.kernels.push_back(std::move(k));
  }

  std::size_t s = plan.dim;
  check(s > 0 && plan.diagonal.size() == s, "diagonal");
  for (auto d : plan.diagonal) check(d > 0, "diagonal entries must be positive");
  for (const auto& c : plan.coset_shifts) check(c.size() == s, "coset shift");
  check(!plan.fold || plan.fold_reflect.size() == s, "fold reflection");
  for (const auto& h : plan.planes) check(h.normal.size() == s, "plane normal");
  check(plan.planes.size() <= 63, "too many planes");
  check(plan.r > 0 && plan.sigma.size() == plan.r, "code table");
  for (auto v : plan.sigma) check(v >= -1 && v < static_cast<long long>(plan.subregions.size()), "sigma entry");
  for (const auto& sr : plan.subregions) {
    check(sr.kernel < plan.kernels.size(), "kernel index");
    check(sr.b.size() == s, "offset");
    check(sr.site_map.size() == plan.kernels[sr.kernel].sites.size(), "site map");
  }
  for (const auto& k : plan.kernels) {
    check(k.weights.size() == k.sites.size(), "kernel weights");
    std::vector<int> covered(k.sites.size(), 0);
    for (const auto& g : k.schedule)
      for (auto m : g.members) ++covered[m];
    for (int c : covered) check(c == 1, "schedule is not an exact cover of the kernel sites");
    for (const auto& w : k.weights) check(w.dim() == s, "weight dimension");
  }
  return plan;
}

}  // namespace

std::string serialize_plan(const EvaluationPlan& plan) {
  json body = plan_json(plan);
  json doc;
  doc["format"] = "fastspline-plan";
  doc["version"] = kPlanFormatVersion;
  doc["checksum"] = sha256_hex(body.dump());
  doc["plan"] = std::move(body);
  return doc.dump(1);
}

EvaluationPlan deserialize_plan(std::string_view document) {
  json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::Parse, "plan is not a JSON object");
  if (doc.value("format", std::string()) != "fastspline-plan") fail(ErrorKind::Parse, "not a fastspline plan");
  if (!doc.contains("version") || !doc["version"].is_number_integer()) fail(ErrorKind::Parse, "plan has no version");
  if (doc["version"].get<int>() != kPlanFormatVersion)
    fail(ErrorKind::Version, "unsupported plan version " + doc["version"].dump());
  if (!doc.contains("plan") || !doc.contains("checksum")) fail(ErrorKind::Parse, "plan body or checksum missing");
  if (sha256_hex(doc["plan"].dump()) != doc["checksum"].get<std::string>())
    fail(ErrorKind::Checksum, "plan checksum mismatch");
  try {
    return plan_from(doc["plan"]);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed plan: ") + e.what());
  } catch (const std::invalid_argument& e) {
    fail(ErrorKind::Parse, std::string("malformed plan: ") + e.what());
  }
}

}  // namespace fastspline
