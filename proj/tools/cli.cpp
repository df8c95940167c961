#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace cubic3::cli {

const std::vector<std::string> kCommands = {"singular", "defect", "hodge", "surfaces", "lines"};

namespace {

constexpr const char* kExact = "exact";
constexpr const char* kNumeric = "certified-numeric";
constexpr const char* kProbabilistic = "probabilistic";

ordered_json flagged(ordered_json value, const char* certification) {
  return {{"value", std::move(value)}, {"certification", certification}};
}

ordered_json point_json(const CVector& x) {
  CPoint p(x);
  ordered_json out = ordered_json::array();
  for (int i = 0; i < p.size(); ++i) out.push_back({p[i].real(), p[i].imag()});
  return out;
}

ordered_json exact_json(const RatVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_string(v(i)));
  return out;
}

ordered_json verdict(Verdict v, const char* certification) { return flagged(to_string(v), certification); }

ordered_json settings_json(const TrackerSettings& s) {
  return {{"initial_step", s.initial_step},
          {"min_step", s.min_step},
          {"max_step", s.max_step},
          {"corrector_tolerance", s.corrector_tolerance},
          {"max_corrector_iterations", s.max_corrector_iterations},
          {"divergence_bound", s.divergence_bound},
          {"endgame_radius", s.endgame_radius},
          {"endgame_samples", s.endgame_samples},
          {"max_winding", s.max_winding},
          {"clustering_radius", s.clustering_radius},
          {"max_failure_fraction", s.max_failure_fraction}};
}

void apply_settings(TrackerSettings& s, const ordered_json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "initial_step") s.initial_step = value.get<double>();
    else if (key == "min_step") s.min_step = value.get<double>();
    else if (key == "max_step") s.max_step = value.get<double>();
    else if (key == "corrector_tolerance") s.corrector_tolerance = value.get<double>();
    else if (key == "max_corrector_iterations") s.max_corrector_iterations = value.get<int>();
    else if (key == "divergence_bound") s.divergence_bound = value.get<double>();
    else if (key == "endgame_radius") s.endgame_radius = value.get<double>();
    else if (key == "endgame_samples") s.endgame_samples = value.get<int>();
    else if (key == "max_winding") s.max_winding = value.get<int>();
    else if (key == "clustering_radius") s.clustering_radius = value.get<double>();
    else if (key == "max_failure_fraction") s.max_failure_fraction = value.get<double>();
    else throw std::invalid_argument("unknown tracker setting '" + key + "'");
  }
}

ordered_json singular_point_json(const SingularPoint& p) {
  ordered_json j;
  j["exact"] = p.exact ? exact_json(primitive_integer(*p.exact)) : ordered_json(nullptr);
  j["approx"] = point_json(p.approx);
  j["cluster_multiplicity"] = p.cluster_multiplicity;
  j["corank"] = p.corank < 0 ? ordered_json(nullptr) : flagged(p.corank, p.corank_certified ? kExact : kProbabilistic);
  j["milnor"] = p.milnor < 0 ? ordered_json(nullptr) : flagged(p.milnor, p.milnor_certified ? kExact : kProbabilistic);
  j["type"] = p.type.name();
  if (p.invariants)
    j["local_invariants"] = {{"b11", p.invariants->b11}, {"l11", p.invariants->l11}};
  else
    j["local_invariants"] = nullptr;
  return j;
}

ordered_json projection_json(const Projection& p) {
  ordered_json j;
  j["point"] = p.point ? exact_json(primitive_integer(*p.point)) : point_json(p.approx);
  j["corank"] = p.corank;
  j["quadric"] = to_string(p.quadric);
  j["degrees"] = p.partition.degrees();
  j["k"] = p.k;
  j["sigma"] = p.sigma;
  j["loops"] = p.partition.loops;
  j["stabilized"] = p.partition.stabilized;
  j["certified"] = p.certified;
  j["seed"] = p.seed;
  return j;
}

ordered_json error_json(const std::string& kind, const std::string& what) {
  return {{"status", "error"}, {"kind", kind}, {"error", what}};
}

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

bool wants(const AnalysisRequest& req, const std::string& c) {
  return std::find(req.commands.begin(), req.commands.end(), c) != req.commands.end();
}

void raise(Report& r, int code) {
  // Certification failures outrank ordinary pipeline errors.
  if (code == kCertificationFailure || r.exit_code == kOk) r.exit_code = code;
}

const char* good_certification(const GoodVerdict& g, bool exact) {
  if (g.good == Verdict::No) return exact && !g.reason.ends_with("(numerically)") && g.reason.find("contains") != std::string::npos
                                        ? kExact
                                        : kNumeric;
  return kProbabilistic;
}

ordered_json line_json(const Form& f, const Line& l, std::uint64_t seed, const TrackerSettings& settings,
                       const std::optional<std::vector<int>>& x_coranks) {
  ordered_json j;
  j["exact"] = l.is_exact();
  j["points"] = l.is_exact() ? ordered_json::array({exact_json(*l.exact_p), exact_json(*l.exact_q)})
                             : ordered_json::array({point_json(l.p), point_json(l.q)});
  j["seed"] = seed;
  ConicBundleData cb;
  try {
    cb = conic_bundle(f, l);
  } catch (const LineError& e) {
    j["status"] = "rejected";
    j["reason"] = e.what();
    return j;
  }
  j["status"] = "ok";
  j["discriminant_degree"] = cb.discriminant.degree();
  j["discriminant"] = cb.exact_discriminant ? ordered_json(cb.exact_discriminant->to_string()) : ordered_json(nullptr);
  Rng rng(seed);
  auto v = very_good_test(cb, rng.next_seed(), settings);
  ordered_json good = verdict(v.good.good, good_certification(v.good, cb.exact_parts.has_value()));
  good["reason"] = v.good.reason;
  good["witness"] = v.good.witness ? point_json(*v.good.witness) : ordered_json(nullptr);
  good["rank_one_residual"] = v.good.residual;
  good["criterion"] = "no residual conic contains l and none is a double line (reconstructed criterion)";
  j["good"] = good;
  if (v.good.good != Verdict::Yes) {
    j["very_good"] = flagged(false, v.good.good == Verdict::No ? good_certification(v.good, true) : kProbabilistic);
    return j;
  }
  j["discriminant_irreducible"] = verdict(v.discriminant_irreducible, v.discriminant_certified ? kNumeric : kProbabilistic);
  j["discriminant_components"] = v.discriminant_components;
  j["cover_connected"] = verdict(v.cover_connected, v.cover_certified ? kNumeric : kProbabilistic);
  j["loops"] = v.loops;
  j["transports"] = v.transports;
  const char* vg_cert = kProbabilistic;
  if (v.very_good && v.discriminant_certified && v.cover_certified) vg_cert = kNumeric;
  if (!v.very_good && v.discriminant_irreducible == Verdict::No && v.discriminant_certified) vg_cert = kNumeric;
  j["very_good"] = flagged(v.very_good, vg_cert);
  if (!v.very_good && v.cover_connected == Verdict::No) j["note"] = "no sheet swap within the loop budget: likely split";

  ordered_json ds;
  try {
    auto sing = discriminant_singularities(cb, rng.next_seed());
    std::vector<int> coranks;
    for (const auto& p : sing) coranks.push_back(p.corank);
    std::sort(coranks.begin(), coranks.end());
    ds["squarefree"] = true;
    ds["coranks"] = coranks;
    ds["matches_x"] = x_coranks ? ordered_json(coranks == *x_coranks) : ordered_json(nullptr);
  } catch (const NonIsolatedSingularLocus&) {
    ds["squarefree"] = false;
  } catch (const std::exception& e) {
    ds["error"] = e.what();
  }
  j["discriminant_singularities"] = ds;
  return j;
}

}  // namespace

std::string read_source(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw std::invalid_argument("cannot read " + arg.substr(1));
  std::string line, out;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') out += line + " ";
  return out;
}

RatVector parse_point(const std::string& text, int n) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<Rat> coords;
  for (std::string tok; in >> tok;) coords.push_back(parse_rational(tok));
  if (static_cast<int>(coords.size()) != n)
    throw std::invalid_argument("point '" + text + "' needs " + std::to_string(n) + " coordinates");
  RatVector v(n);
  for (int i = 0; i < n; ++i) v(i) = coords[i];
  if (v.isZero()) throw std::invalid_argument("point '" + text + "' is zero");
  return v;
}

Report run_pipeline(const AnalysisRequest& req) {
  Report r;
  auto& j = r.json;
  const Form& f = req.form;
  j["schema"] = 1;
  j["input"] = {{"source", req.source}, {"form", f.to_string()}};
  j["seed"] = req.seed;
  j["settings"] = settings_json(req.settings);
  j["commands"] = req.commands;

  // Every stage draws its seed whether or not it runs, so a command's output
  // does not depend on which other commands were requested.
  Rng master(req.seed);
  const std::uint64_t s_singular = master.next_seed(), s_defect = master.next_seed(),
                      s_surfaces = master.next_seed(), s_lines = master.next_seed();
  const bool cone = cone_test(f).is_cone;
  const bool need_defect = wants(req, "defect") || wants(req, "hodge") || wants(req, "surfaces");

  std::vector<SingularPoint> points;
  std::optional<std::string> singular_error;
  {
    Clock c;
    try {
      points = find_singular_points(f, s_singular, req.settings);
    } catch (const NonIsolatedSingularLocus& e) {
      singular_error = cone ? std::string("degenerate cone, outside the scope of the defect formula: ") + e.what()
                            : std::string(e.what());
    } catch (const std::exception& e) {
      singular_error = e.what();
    }
    r.timings.push_back({"singular", c.seconds()});
  }

  std::optional<DefectReport> defect;
  ordered_json defect_error;
  if (need_defect && !singular_error) {
    Clock c;
    try {
      defect = compute_defect(f, points, s_defect, req.settings);
      points = defect->points;
    } catch (const CertificationFailure& e) {
      defect_error = error_json("certification", e.what());
    } catch (const InconsistentClassification& e) {
      defect_error = error_json("certification", e.what());
    } catch (const std::exception& e) {
      defect_error = error_json("pipeline", e.what());
    }
    r.timings.push_back({"defect", c.seconds()});
  }
  if (!defect && !singular_error) {
    for (auto& p : points) {
      try {
        analyze_point(f, p, std::nullopt, s_defect);
      } catch (const std::exception&) {
        // Left unclassified; the fields stay null in the report.
      }
    }
  }

  auto fail = [&](const char* name, const ordered_json& e) {
    j[name] = e;
    raise(r, e["kind"] == "certification" ? kCertificationFailure : kPipelineError);
  };
  const ordered_json upstream =
      singular_error ? error_json("pipeline", "singular points unavailable: " + *singular_error) : defect_error;

  if (wants(req, "singular")) {
    if (singular_error) {
      fail("singular", error_json("pipeline", *singular_error));
    } else {
      ordered_json s;
      s["status"] = "ok";
      s["seed"] = s_singular;
      s["count"] = flagged(static_cast<int>(points.size()), kNumeric);
      s["points"] = ordered_json::array();
      for (const auto& p : points) s["points"].push_back(singular_point_json(p));
      j["singular"] = s;
    }
  }

  if (wants(req, "defect")) {
    if (!defect) {
      fail("defect", upstream);
    } else {
      ordered_json d;
      d["status"] = "ok";
      d["seed"] = s_defect;
      d["smooth"] = defect->smooth;
      d["cone"] = defect->cone;
      const char* cert = defect->cone ? kExact : defect->certified ? kNumeric : kProbabilistic;
      d["sigma"] = defect->sigma ? flagged(*defect->sigma, cert) : ordered_json(nullptr);
      d["projections"] = ordered_json::array();
      for (const auto& p : defect->projections) d["projections"].push_back(projection_json(p));
      d["notes"] = defect->notes;
      j["defect"] = d;
    }
  }

  if (wants(req, "hodge")) {
    if (!defect) {
      fail("hodge", upstream);
    } else if (!defect->smooth && !defect->sigma) {
      fail("hodge", error_json("pipeline", "sigma undetermined"));
    } else {
      try {
        int sigma = defect->smooth ? 0 : *defect->sigma;
        auto h = hodge_numbers(defect->points, sigma);
        bool exact_inputs = defect->smooth || defect->cone || defect->certified;
        const char* cert = h.mu_certified && exact_inputs ? (defect->smooth || defect->cone ? kExact : kNumeric)
                                                          : kProbabilistic;
        ordered_json hj;
        hj["status"] = "ok";
        hj["mu_total"] = flagged(h.mu_total, h.mu_certified ? kExact : kProbabilistic);
        hj["sigma_used"] = sigma;
        hj["h3"] = flagged(h.h3, cert);
        hj["B"] = h.B ? ordered_json(*h.B) : ordered_json(nullptr);
        hj["L"] = h.L ? ordered_json(*h.L) : ordered_json(nullptr);
        hj["h12"] = h.h12 ? flagged(*h.h12, cert) : ordered_json(nullptr);
        hj["h21"] = h.h21 ? flagged(*h.h21, cert) : ordered_json(nullptr);
        if (defect->smooth) hj["note"] = "X is smooth: sigma = 0 is used in the formulas";
        if (!h.h12) hj["note"] = "some point has no known local invariants: h12 and h21 omitted";
        j["hodge"] = hj;
      } catch (const std::exception& e) {
        fail("hodge", error_json("pipeline", e.what()));
      }
    }
  }

  if (wants(req, "surfaces")) {
    Clock c;
    if (!defect) {
      fail("surfaces", upstream);
    } else if (defect->cone) {
      j["surfaces"] = {{"status", "skipped"}, {"reason", "X is a cone over a cubic surface: sigma = 6 without projection"}};
    } else if (defect->smooth) {
      j["surfaces"] = {{"status", "ok"},
                       {"contains_plane", verdict(Verdict::No, kExact)},
                       {"contains_scroll", verdict(Verdict::No, kExact)},
                       {"pattern", "smooth: every surface on X is a complete intersection"},
                       {"consistent_with_sigma", nullptr}};
    } else if (!defect->chosen()) {
      fail("surfaces", error_json("pipeline", "no projection available"));
    } else {
      try {
        auto s = detect_plane_scroll(*defect->chosen(), s_surfaces, req.settings, defect->sigma);
        const char* cert = defect->chosen()->certified ? kNumeric : kProbabilistic;
        ordered_json sj;
        sj["status"] = "ok";
        sj["seed"] = s_surfaces;
        sj["contains_plane"] = verdict(s.contains_plane, cert);
        sj["contains_scroll"] = verdict(s.contains_scroll, cert);
        sj["pattern"] = s.pattern;
        sj["consistent_with_sigma"] = s.consistent ? ordered_json(*s.consistent) : ordered_json(nullptr);
        j["surfaces"] = sj;
        if (s.consistent && !*s.consistent) raise(r, kCertificationFailure);
      } catch (const std::exception& e) {
        fail("surfaces", error_json("pipeline", e.what()));
      }
    }
    r.timings.push_back({"surfaces", c.seconds()});
  }

  if (wants(req, "lines")) {
    Clock c;
    if (cone) {
      j["lines"] = {{"status", "skipped"},
                    {"reason", "X is a cone: the conic-bundle line tests do not apply"}};
    } else {
      ordered_json lj;
      lj["status"] = "ok";
      lj["seed"] = s_lines;
      lj["good_lines_exclude_singular_points"] = true;
      Rng rng(s_lines);
      const std::uint64_t s_sample = rng.next_seed();
      std::vector<Line> lines;
      try {
        if (req.lines.empty()) {
          lines = sample_lines(f, req.sample, s_sample, req.settings);
          lj["sampled"] = req.sample;
        } else {
          for (const auto& [p, q] : req.lines) lines.push_back(Line::exact(p, q));
        }
      } catch (const std::exception& e) {
        lj = error_json("pipeline", std::string("line sampling failed: ") + e.what());
        raise(r, kPipelineError);
      }
      std::optional<std::vector<int>> x_coranks;
      if (!singular_error && std::all_of(points.begin(), points.end(), [](const SingularPoint& p) { return p.corank >= 0; })) {
        std::vector<int> xs;
        for (const auto& p : points) xs.push_back(p.corank);
        std::sort(xs.begin(), xs.end());
        x_coranks = xs;
      }
      if (lj["status"] == "ok") {
        lj["lines"] = ordered_json::array();
        int good = 0, very_good = 0;
        for (const auto& l : lines) {
          try {
            auto one = line_json(f, l, rng.next_seed(), req.settings, x_coranks);
            if (one.contains("good") && one["good"]["value"] == "yes") ++good;
            if (one.contains("very_good") && one["very_good"]["value"] == true) ++very_good;
            lj["lines"].push_back(std::move(one));
          } catch (const std::exception& e) {
            lj["lines"].push_back(error_json("pipeline", e.what()));
            raise(r, kPipelineError);
          }
        }
        lj["good_count"] = good;
        lj["very_good_count"] = very_good;
      }
      j["lines"] = lj;
    }
    r.timings.push_back({"lines", c.seconds()});
  }
  return r;
}

namespace {

std::string value_text(const ordered_json& v) {
  if (v.is_null()) return "n/a";
  if (v.is_object() && v.contains("value")) {
    const auto& x = v["value"];
    std::string s = x.is_string() ? x.get<std::string>() : x.dump();
    return s + " (" + v["certification"].get<std::string>() + ")";
  }
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

std::string summary(const Report& r) {
  const auto& j = r.json;
  std::ostringstream out;
  out << "form: " << j["input"]["form"].get<std::string>() << "\n";
  out << "seed: " << j["seed"].get<std::uint64_t>() << "\n";
  auto status = [&](const char* name) -> std::string {
    const auto& c = j[name];
    if (c["status"] == "error") return "error: " + c["error"].get<std::string>();
    if (c["status"] == "skipped") return "skipped: " + c["reason"].get<std::string>();
    return "";
  };
  for (const auto& name : kCommands) {
    if (!j.contains(name)) continue;
    out << name << ": ";
    std::string s = status(name.c_str());
    const auto& c = j[name];
    if (!s.empty()) {
      out << s;
    } else if (name == "singular") {
      out << c["points"].size() << " point(s)";
      for (const auto& p : c["points"]) out << "\n  " << p["type"].get<std::string>() << " corank " << value_text(p["corank"]) << " mu " << value_text(p["milnor"]);
    } else if (name == "defect") {
      out << "sigma = " << value_text(c["sigma"]) << ", " << c["projections"].size() << " projection(s)";
      for (const auto& n : c["notes"]) out << "\n  note: " << n.get<std::string>();
    } else if (name == "hodge") {
      out << "mu = " << value_text(c["mu_total"]) << ", h3 = " << value_text(c["h3"]) << ", h12 = " << value_text(c["h12"])
          << ", h21 = " << value_text(c["h21"]);
    } else if (name == "surfaces") {
      out << "plane " << value_text(c["contains_plane"]) << ", scroll " << value_text(c["contains_scroll"]) << " ["
          << c["pattern"].get<std::string>() << "]";
    } else if (name == "lines") {
      out << c["lines"].size() << " line(s), " << c["good_count"].get<int>() << " good, " << c["very_good_count"].get<int>()
          << " very good";
      for (const auto& l : c["lines"]) {
        out << "\n  ";
        if (l.value("status", "") != "ok") {
          out << l.value("status", "error") << ": " << l.value("reason", l.value("error", ""));
          continue;
        }
        out << "good " << value_text(l["good"]) << ", very good " << value_text(l["very_good"]);
      }
    }
    out << "\n";
  }
  out << "timings:";
  for (const auto& t : r.timings) out << " " << t.command << " " << std::fixed << std::setprecision(2) << t.seconds << "s";
  out << "\n";
  return out.str();
}

// ------------------------------------------------------------ command line

namespace {

struct CommonOptions {
  std::string input;
  std::string commands;
  std::optional<std::uint64_t> seed;
  std::string json_path;
  std::optional<double> tol;
  std::string config;
  std::optional<int> sample;
  std::vector<std::string> through;
};

void add_common(CLI::App* app, CommonOptions& o, bool with_commands) {
  if (with_commands)
    app->add_option("--commands", o.commands, "comma-separated subset of singular,defect,hodge,surfaces,lines");
  app->add_option("--seed", o.seed, "random seed (default: fresh, always echoed)");
  app->add_option("--json", o.json_path, "write the JSON report here ('-' for standard output)");
  app->add_option("--tol", o.tol, "corrector tolerance of the path tracker")->check(CLI::PositiveNumber);
  app->add_option("--config", o.config, "JSON file with seed, commands, sample, tolerance and tracker settings")
      ->check(CLI::ExistingFile);
  app->add_option("--sample", o.sample, "number of random lines to test")->check(CLI::Range(1, 1000));
}

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split_commands(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) {
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    if (tok.empty()) continue;
    if (std::find(kCommands.begin(), kCommands.end(), tok) == kCommands.end())
      throw UsageError("unknown command '" + tok + "'");
    out.push_back(tok);
  }
  return out;
}

Form parse_cubic(const std::string& text) {
  Form f = parse_form(text);
  if (f.degree() != 3) throw UsageError("expected a cubic form, got degree " + std::to_string(f.degree()));
  return f;
}

// Fills everything except the form; defaults < config file < flags.
AnalysisRequest build_request(const CommonOptions& o, std::vector<std::string> default_commands) {
  AnalysisRequest req;
  req.commands = std::move(default_commands);
  std::optional<std::uint64_t> seed;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    ordered_json c;
    try {
      c = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw UsageError("config " + o.config + ": " + e.what());
    }
    for (const auto& [key, value] : c.items()) {
      try {
        if (key == "seed") seed = value.get<std::uint64_t>();
        else if (key == "commands") req.commands = split_commands(value.is_string() ? value.get<std::string>() : [&] {
                 std::string s;
                 for (const auto& v : value) s += v.get<std::string>() + ",";
                 return s;
               }());
        else if (key == "sample") req.sample = value.get<int>();
        else if (key == "tolerance") req.settings.corrector_tolerance = value.get<double>();
        else if (key == "tracker") apply_settings(req.settings, value);
        else throw UsageError("unknown config key '" + key + "'");
      } catch (const UsageError&) {
        throw;
      } catch (const std::exception& e) {
        throw UsageError("config " + o.config + ", key '" + key + "': " + e.what());
      }
    }
  }
  if (!o.commands.empty()) req.commands = split_commands(o.commands);
  if (req.commands.empty()) throw UsageError("no commands requested");
  // Canonical order, no duplicates.
  std::vector<std::string> ordered;
  for (const auto& c : kCommands)
    if (std::find(req.commands.begin(), req.commands.end(), c) != req.commands.end()) ordered.push_back(c);
  req.commands = ordered;
  if (o.seed) seed = o.seed;
  req.seed = seed ? *seed : (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
  if (o.tol) req.settings.corrector_tolerance = *o.tol;
  if (o.sample) req.sample = *o.sample;
  try {
    req.settings.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return req;
}

void emit(const ordered_json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) return;
  if (path == "-") {
    out << j.dump(2) << "\n";
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << j.dump(2) << "\n";
}

void report_parse_error(const ParseError& e, const std::string& text, std::ostream& err) {
  err << "error: " << e.what() << "\n  " << text << "\n  " << std::string(std::min(e.position(), text.size()), ' ')
      << std::string(std::max<std::size_t>(e.length(), 1), '^') << "\n";
}

std::vector<std::string> batch_inputs(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    if (std::filesystem::is_directory(a)) {
      std::vector<std::string> files;
      for (const auto& e : std::filesystem::directory_iterator(a))
        if (e.path().extension() == ".txt") files.push_back(e.path().string());
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Defect, Hodge numbers and lines of singular cubic threefolds", "cubic3"};
  app.require_subcommand(1);
  CommonOptions analyze_opts, lines_opts, batch_opts;
  std::vector<std::string> batch_args;

  auto* analyze = app.add_subcommand("analyze", "analyze one cubic given inline or as @file");
  analyze->add_option("input", analyze_opts.input, "polynomial text or @file")->required();
  add_common(analyze, analyze_opts, true);

  auto* lines = app.add_subcommand("lines", "good and very good tests for given or sampled lines");
  lines->add_option("input", lines_opts.input, "polynomial text or @file")->required();
  lines->add_option("--through", lines_opts.through, "two points spanning the line, e.g. 1,-1,0,0,0")
      ->expected(2);
  add_common(lines, lines_opts, false);

  auto* batch = app.add_subcommand("batch", "run analyze over fixture files or directories");
  batch->add_option("inputs", batch_args, "files or directories of .txt fixtures")->required();
  add_common(batch, batch_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  auto load = [&](const std::string& arg, AnalysisRequest& req) {
    req.source = arg;
    std::string text = read_source(arg);
    req.form = parse_cubic(text);
  };

  try {
    if (batch->parsed()) {
      AnalysisRequest base = build_request(batch_opts, {"singular", "defect", "hodge", "surfaces"});
      ordered_json all;
      all["schema"] = 1;
      all["seed"] = base.seed;
      all["results"] = ordered_json::array();
      int code = kOk;
      for (const auto& file : batch_inputs(batch_args)) {
        AnalysisRequest req = base;
        std::string name = std::filesystem::path(file).stem().string();
        std::string text;
        try {
          load("@" + file, req);
        } catch (const ParseError& e) {
          err << name << ": ";
          report_parse_error(e, read_source("@" + file), err);
          all["results"].push_back({{"name", name}, {"status", "parse error"}, {"error", e.what()}});
          code = code == kOk ? kParseError : code;
          continue;
        }
        Report r = run_pipeline(req);
        out << "== " << name << "\n" << summary(r);
        all["results"].push_back({{"name", name}, {"report", r.json}});
        if (r.exit_code == kCertificationFailure || (code == kOk && r.exit_code != kOk)) code = r.exit_code;
      }
      emit(all, batch_opts.json_path, out);
      return code;
    }

    const bool is_lines = lines->parsed();
    const CommonOptions& o = is_lines ? lines_opts : analyze_opts;
    AnalysisRequest req =
        build_request(o, is_lines ? std::vector<std::string>{"lines"} : std::vector<std::string>(kCommands));
    if (is_lines) req.commands = {"lines"};
    std::string text;
    try {
      text = read_source(o.input);
      req.source = o.input;
      req.form = parse_cubic(text);
    } catch (const ParseError& e) {
      report_parse_error(e, text, err);
      return kParseError;
    }
    if (is_lines && !o.through.empty()) {
      req.lines.push_back({parse_point(o.through[0], req.form.nvars()), parse_point(o.through[1], req.form.nvars())});
      if (rank_exact([&] {
            RatMatrix m(2, req.form.nvars());
            m.row(0) = req.lines[0].first.transpose();
            m.row(1) = req.lines[0].second.transpose();
            return m;
          }()) < 2)
        throw UsageError("the two points coincide");
    }
    Report r = run_pipeline(req);
    if (o.json_path != "-") out << summary(r);
    emit(r.json, o.json_path, out);
    return r.exit_code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kPipelineError;
  }
}

}  // namespace cubic3::cli
