#include "garma/design_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace garma {

std::string format_real(Real value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", value);
  return buf;
}

Real parse_real(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    std::size_t used = 0;
    Real r = 0;
    try {
      r = std::stold(s, &used);
    } catch (const std::exception&) {
      throw InputError("not a number: \"" + s + "\"");
    }
    if (used != s.size()) throw InputError("not a number: \"" + s + "\"");
    return r;
  }
  throw InputError("expected a number, got " + value.dump());
}

namespace {

json complex_json(const Complex& z) { return json::array({format_real(z.real()), format_real(z.imag())}); }

Complex parse_complex(const json& j) {
  if (j.is_array() && j.size() == 2) return {parse_real(j[0]), parse_real(j[1])};
  return {parse_real(j), 0.0L};
}

json interval_json(const SpectralInterval& iv) { return json::array({iv.lambda_min, iv.lambda_max}); }

SpectralInterval parse_interval(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("interval must be [lambda_min, lambda_max]");
  SpectralInterval iv{j[0].get<double>(), j[1].get<double>()};
  if (!(iv.lambda_max > iv.lambda_min)) throw InputError("interval must satisfy lambda_min < lambda_max");
  return iv;
}

std::vector<double> parse_doubles(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(static_cast<double>(parse_real(v)));
  return out;
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace

DesignDocument make_document(const ArmaDesign& design, const std::string& response_description) {
  DesignDocument doc;
  doc.family = "arma";
  doc.response_description = response_description;
  doc.rational = design.rational;
  doc.parallel = design.parallel;
  doc.periodic = design.periodic;
  doc.stability = design.stability;
  doc.periodic_stability = design.periodic_stability;
  doc.prefit_order = design.prefit_order_used;
  doc.fallback = design.fallback;
  doc.l2_error = design.l2_error;
  return doc;
}

DesignDocument make_document(const FirDesign& design, const std::string& response_description, double l2) {
  DesignDocument doc;
  doc.family = "fir";
  doc.response_description = response_description;
  doc.fir = design;
  doc.l2_error = l2;
  return doc;
}

json to_json(const DesignDocument& doc) {
  json j;
  j["family"] = doc.family;
  if (!doc.response_description.empty()) j["response"] = doc.response_description;
  if (doc.l2_error) j["l2_error"] = *doc.l2_error;

  if (doc.fir) {
    j["order"] = doc.fir->order();
    j["interval"] = interval_json(doc.fir->interval);
    j["fir"] = {{"h", doc.fir->h}};
    return j;
  }
  if (!doc.rational) throw InputError("ARMA design document without rational coefficients");
  const auto& r = *doc.rational;
  j["order"] = r.order();
  j["interval"] = interval_json(r.interval);
  j["prefit_order"] = doc.prefit_order;
  j["fallback"] = doc.fallback;
  j["rational"] = {{"b", r.b}, {"a", r.a}};

  if (doc.parallel) {
    json branches = json::array();
    for (const auto& br : doc.parallel->branches)
      branches.push_back({{"psi", complex_json(br.psi)}, {"phi", complex_json(br.phi)}});
    j["parallel"] = {{"branches", branches}};
  }
  if (doc.periodic) {
    json theta = json::array(), psi = json::array(), phi = json::array();
    for (Real t : doc.periodic->theta) theta.push_back(format_real(t));
    for (const auto& z : doc.periodic->psi) psi.push_back(complex_json(z));
    for (const auto& z : doc.periodic->phi) phi.push_back(complex_json(z));
    j["periodic"] = {{"theta", theta}, {"psi", psi}, {"phi", phi}};
  }
  if (doc.stability) {
    json poles = json::array();
    for (const auto& p : doc.stability->poles) poles.push_back(complex_json(p));
    j["stability"] = {{"stable", doc.stability->stable},
                      {"radius", doc.stability->radius},
                      {"eps", doc.stability->eps},
                      {"poles", poles},
                      {"margins", doc.stability->margins}};
  }
  if (doc.periodic_stability) {
    j["periodic_stability"] = {{"stable", doc.periodic_stability->stable},
                               {"endpoint_product", doc.periodic_stability->endpoint_product},
                               {"sup_contraction", doc.periodic_stability->sup_contraction}};
  }
  if (!doc.notes.empty()) j["notes"] = doc.notes;
  return j;
}

DesignDocument design_from_json(const json& j) {
  DesignDocument doc;
  doc.family = j.value("family", std::string("arma"));
  doc.response_description = j.value("response", std::string());
  if (j.contains("l2_error")) doc.l2_error = j["l2_error"].get<double>();
  const SpectralInterval iv = parse_interval(require(j, "interval"));

  if (doc.family == "fir") {
    FirDesign fir;
    fir.h = parse_doubles(require(require(j, "fir"), "h"), "fir.h");
    if (fir.h.empty()) throw InputError("fir.h must not be empty");
    fir.interval = iv;
    doc.fir = std::move(fir);
    return doc;
  }
  if (doc.family != "arma") throw InputError("unknown design family \"" + doc.family + "\"");

  const json& rj = require(j, "rational");
  RationalDesign r;
  r.b = parse_doubles(require(rj, "b"), "rational.b");
  r.a = parse_doubles(require(rj, "a"), "rational.a");
  r.interval = iv;
  if (r.a.empty()) throw InputError("rational.a must have at least one coefficient");
  if (r.b.size() > r.a.size()) throw InputError("rational.b longer than rational.a");
  doc.rational = r;
  doc.prefit_order = j.value("prefit_order", std::size_t{0});
  doc.fallback = j.value("fallback", std::string("none"));

  if (j.contains("parallel")) {
    ParallelForm form;
    form.interval = iv;
    for (const auto& bj : require(j["parallel"], "branches"))
      form.branches.push_back({parse_complex(require(bj, "psi")), parse_complex(require(bj, "phi"))});
    doc.parallel = std::move(form);
  } else {
    try {
      doc.parallel = to_parallel(r);
    } catch (const Error& e) {
      doc.notes.push_back(std::string("parallel form not derived: ") + e.what());
    }
  }

  if (j.contains("periodic")) {
    const json& pj = j["periodic"];
    PeriodicForm form;
    form.interval = iv;
    for (const auto& v : require(pj, "psi")) form.psi.push_back(parse_complex(v));
    for (const auto& v : require(pj, "phi")) form.phi.push_back(parse_complex(v));
    if (pj.contains("theta")) {
      for (const auto& v : pj["theta"]) form.theta.push_back(parse_real(v));
    } else {
      form.theta.assign(form.psi.size(), 1.0L);
      if (!form.theta.empty()) form.theta[0] = 0.0L;
    }
    if (form.theta.size() != form.psi.size() || form.phi.size() != form.psi.size())
      throw InputError("periodic theta, psi and phi must have equal length");
    doc.periodic = std::move(form);
  } else {
    try {
      doc.periodic = to_periodic(r);
    } catch (const Error& e) {
      doc.notes.push_back(std::string("periodic form not derived: ") + e.what());
    }
  }

  // Stability is always re-derived from the coefficients; stored reports are
  // informational and a tampered "stable": true must not bypass the gate.
  doc.stability = check_stability_rational(r);
  if (doc.periodic) doc.periodic_stability = check_stability_periodic(*doc.periodic);
  return doc;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

DesignDocument read_design_file(const std::filesystem::path& path) {
  try {
    return design_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_design_file(const std::filesystem::path& path, const DesignDocument& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json(doc).dump(2) << '\n';
}

DesignConfig design_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    DesignConfig c;
    c.family = j.value("family", c.family);
    if (c.family != "arma" && c.family != "fir") throw InputError("family must be \"arma\" or \"fir\"");
    c.kind = j.value("kind", c.kind);
    if (c.kind != "step" && c.kind != "window" && c.kind != "custom_sampled")
      throw InputError("kind must be step, window or custom_sampled");
    if (j.contains("interval")) c.interval = parse_interval(j["interval"]);
    if (j.contains("order")) {
      const auto k = j["order"].get<long long>();
      if (k < 0) throw InputError("order must be >= 0");
      c.order = static_cast<std::size_t>(k);
    }
    if (j.contains("cutoff")) c.cutoff = j["cutoff"].get<double>();
    if (j.contains("window")) {
      const auto& w = j["window"];
      if (!w.is_array() || w.size() != 2) throw InputError("window must be [lo, hi]");
      c.window_lo = w[0].get<double>();
      c.window_hi = w[1].get<double>();
    }
    if (j.contains("samples_file")) {
      std::filesystem::path p = j["samples_file"].get<std::string>();
      c.samples_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (j.contains("prefit_order")) c.options.prefit_order = j["prefit_order"].get<std::size_t>();
    c.options.grid_size = j.value("grid_size", c.options.grid_size);
    c.options.max_prefit_extra = j.value("max_prefit_extra", c.options.max_prefit_extra);
    c.options.eps_stab = j.value("eps_stab", c.options.eps_stab);
    c.options.eps_sep = j.value("eps_sep", c.options.eps_sep);
    c.options.reflect_delta = j.value("reflect_delta", c.options.reflect_delta);
    c.options.agreement_tol = j.value("agreement_tol", c.options.agreement_tol);
    if (c.options.grid_size < 2) throw InputError("grid_size must be >= 2");
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("design config: ") + e.what());
  }
}

json to_json(const DesignConfig& c) {
  json j{{"family", c.family},
         {"kind", c.kind},
         {"interval", interval_json(c.interval)},
         {"order", c.order},
         {"grid_size", c.options.grid_size},
         {"prefit_order", c.options.prefit_order.value_or(c.order + 1)},
         {"max_prefit_extra", c.options.max_prefit_extra},
         {"eps_stab", c.options.eps_stab},
         {"eps_sep", c.options.eps_sep},
         {"reflect_delta", c.options.reflect_delta},
         {"agreement_tol", c.options.agreement_tol}};
  if (c.cutoff) j["cutoff"] = *c.cutoff;
  if (c.window_lo) j["window"] = {*c.window_lo, *c.window_hi};
  if (c.samples_file) j["samples_file"] = c.samples_file->string();
  return j;
}

DesiredResponse make_response(const DesignConfig& c) {
  if (c.kind == "step") return DesiredResponse::step(c.interval, c.cutoff);
  if (c.kind == "window") return DesiredResponse::window(c.interval, c.window_lo, c.window_hi);
  if (!c.samples_file) throw InputError("custom_sampled response needs samples_file");
  return DesiredResponse::sampled(c.interval, read_response_samples_csv(c.samples_file->string()));
}

}  // namespace garma
