// Command-line front end for the macjscc library: fixture reports, JSON
// input, CSV/JSON output, figure-data sweeps, seeded simulations.  Every
// file-writing command also writes <out>.manifest.json so a run can be
// replayed bit for bit.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "macjscc/admissibility.hpp"
#include "macjscc/discrete.hpp"
#include "macjscc/errors.hpp"
#include "macjscc/fading.hpp"
#include "macjscc/feedback.hpp"
#include "macjscc/fixtures.hpp"
#include "macjscc/gmac.hpp"
#include "macjscc/io.hpp"
#include "macjscc/mcsim.hpp"
#include "macjscc/mixture.hpp"
#include "macjscc/orthogonal.hpp"
#include "macjscc/version.hpp"

using json = nlohmann::json;
using namespace macjscc;

namespace {

int dispatch(const std::vector<std::string>& args);

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string fmt_opt(const std::optional<double>& x) { return x ? fmt(*x) : ""; }

// --seed beats MACJSCC_SEED beats 0.
uint64_t resolve_seed(const CLI::Option* seed_opt, uint64_t seed_value) {
  if (seed_opt->count() > 0) return seed_value;
  const char* env = std::getenv("MACJSCC_SEED");
  if (env && *env) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0')
      throw input_error(std::string("MACJSCC_SEED is not an integer: ") + env);
    return static_cast<uint64_t>(v);
  }
  return 0;
}

struct Range {
  double min = 0.0, max = 0.0, step = 0.0;
};

Range parse_range(const std::string& text, const std::string& flag) {
  Range r;
  char trailing = 0;
  int got = std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &r.min, &r.max, &r.step, &trailing);
  if (got != 3) throw input_error(flag + ": expected min:max:step, got '" + text + "'");
  if (!(r.step > 0.0)) throw input_error(flag + ": step must be positive");
  if (r.max < r.min) throw input_error(flag + ": max below min");
  return r;
}

std::vector<double> range_grid(const Range& r) {
  int n = static_cast<int>(std::floor((r.max - r.min) / r.step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) grid.push_back(r.min + i * r.step);
  return grid;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t next = text.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(text.substr(pos));
      break;
    }
    parts.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == nullptr || *end != '\0' || text.empty())
    throw input_error(what + ": not a number: '" + text + "'");
  return v;
}

void write_manifest(const std::string& out_path, const std::vector<std::string>& argv,
                    uint64_t seed, const std::vector<std::string>& outputs) {
  json j;
  j["command"] = argv.empty() ? "" : argv[0];
  j["argv"] = argv;
  j["seed"] = seed;
  j["version"] = kLibraryVersion;
  j["outputs"] = outputs;
  write_text_file(out_path + ".manifest.json", j.dump(2) + "\n");
}

void emit(const json& report, bool as_json) {
  if (as_json) {
    std::fputs((report.dump(2) + "\n").c_str(), stdout);
    return;
  }
  for (auto& [key, value] : report.items()) {
    std::string line = key + " = ";
    if (value.is_number_float())
      line += fmt(value.get<double>());
    else if (value.is_string())
      line += value.get<std::string>();
    else
      line += value.dump();
    std::fputs((line + "\n").c_str(), stdout);
  }
}

json report_theorem1(const AdmissibilityReport& rep) {
  json j;
  j["lhs"] = rep.lhs;
  j["rhs"] = rep.rhs;
  j["margins"] = rep.margins;
  j["d1_achieved"] = rep.d1_achieved;
  j["d2_achieved"] = rep.d2_achieved;
  j["admissible"] = rep.admissible;
  j["binding_constraint"] = rep.binding_constraint;
  return j;
}

DistortionMeasure parse_measure(const std::string& name) {
  if (name == "hamming") return DistortionMeasure::hamming();
  if (name == "squared") return DistortionMeasure::squared_error();
  throw input_error("unknown distortion measure: " + name);
}

fixtures::CoverSi parse_cover_si(const std::string& name) {
  if (name == "none") return fixtures::CoverSi::none;
  if (name == "z1") return fixtures::CoverSi::z1;
  if (name == "z1z2") return fixtures::CoverSi::z1z2;
  if (name == "v") return fixtures::CoverSi::v;
  if (name == "full") return fixtures::CoverSi::full;
  throw input_error("unknown side information selection: " + name);
}

std::vector<SchemeId> parse_schemes(const std::string& text) {
  std::vector<SchemeId> ids;
  for (const auto& part : split(text, ','))
    if (!part.empty()) ids.push_back(scheme_from_name(part));
  if (ids.empty()) throw input_error("--schemes: empty list");
  return ids;
}

// Per-user per-symbol component means and the induced input correlation.
double induced_correlation(const MixtureCodebook& cb) {
  detail::SourceTable st = detail::source_table(cb.source);
  std::vector<double> m1(st.n1, 0.0), m2(st.n2, 0.0);
  for (int s = 0; s < st.n1; ++s)
    for (const auto& c : cb.users[0][static_cast<size_t>(s)]) m1[s] += c.w * c.mean;
  for (int s = 0; s < st.n2; ++s)
    for (const auto& c : cb.users[1][static_cast<size_t>(s)]) m2[s] += c.w * c.mean;
  double cross = 0.0;
  for (int s1 = 0; s1 < st.n1; ++s1)
    for (int s2 = 0; s2 < st.n2; ++s2) cross += st.joint[s1 * st.n2 + s2] * m1[s1] * m2[s2];
  return cross;
}

struct FadingFlags {
  std::string family = "rayleigh";
  int m = 1;
  double nu0 = 1.0;
  std::string table;
};

void add_fading_flags(CLI::App* cmd, FadingFlags& f) {
  cmd->add_option("--family", f.family, "rayleigh, constant, or discrete")
      ->check(CLI::IsMember({"rayleigh", "constant", "discrete"}));
  cmd->add_option("--m", f.m, "number of users");
  cmd->add_option("--nu0", f.nu0, "constant-family gain");
  cmd->add_option("--table", f.table, "discrete table gain:prob,gain:prob,...");
}

FadingModel build_fading(const FadingFlags& f) {
  FadingModel model;
  if (f.family == "rayleigh") {
    model = FadingModel::rayleigh(f.m);
  } else if (f.family == "constant") {
    model = FadingModel::constant(f.m, f.nu0);
  } else {
    std::vector<std::pair<double, double>> table;
    for (const auto& atom : split(f.table, ',')) {
      if (atom.empty()) continue;
      auto pieces = split(atom, ':');
      if (pieces.size() != 2) throw input_error("--table: expected gain:prob entries");
      table.emplace_back(parse_double(pieces[0], "--table gain"),
                         parse_double(pieces[1], "--table prob"));
    }
    model = FadingModel::discrete(f.m, std::move(table));
  }
  model.validate();
  return model;
}

std::vector<int> parse_counts(const std::string& text, size_t n_symbols) {
  std::vector<int> counts;
  for (const auto& part : split(text, ','))
    if (!part.empty()) counts.push_back(static_cast<int>(parse_double(part, "--counts")));
  if (counts.size() == 1) counts.assign(n_symbols, counts[0]);
  if (counts.size() != n_symbols)
    throw input_error("--counts: need one entry or one per source symbol");
  return counts;
}

// ---- subcommand runners ----

void run_region_example(const std::string& name, const std::string& si,
                        const std::string& maps, double d1, double d2, bool as_json) {
  if (name != "cover-example")
    throw input_error("region example: unknown fixture '" + name + "'");
  fixtures::CoverMaps m = maps == "identity" ? fixtures::CoverMaps::identity
                                             : fixtures::CoverMaps::uniform;
  if (maps != "identity" && maps != "uniform")
    throw input_error("region example: unknown maps '" + maps + "'");
  SideInfoSystem sys = fixtures::cover_example(parse_cover_si(si), m, d1, d2);
  AdmissibilityReport rep = check_theorem1(sys);
  json j = report_theorem1(rep);
  j["name"] = name;
  j["si"] = si;
  emit(j, as_json);
}

struct RegionCheckFlags {
  std::string source, q1, q2, m1, m2, channel;
  std::string measure1 = "hamming", measure2 = "hamming";
  double limit1 = 0.0, limit2 = 0.0;
  double joint_limit = -1.0;
  bool has_joint = false;
};

void run_region_check(const RegionCheckFlags& f, bool as_json) {
  SideInfoSystem sys{
      pmf_from_json(read_text_file(f.source)),
      kernel_from_json(read_text_file(f.q1)),
      kernel_from_json(read_text_file(f.q2)),
      kernel_from_json(read_text_file(f.m1)),
      kernel_from_json(read_text_file(f.m2)),
      kernel_from_json(read_text_file(f.channel)),
      DistortionSpec{parse_measure(f.measure1), parse_measure(f.measure2), f.limit1,
                     f.limit2,
                     f.has_joint ? std::optional<double>(f.joint_limit) : std::nullopt}};
  emit(report_theorem1(check_theorem1(sys)), as_json);
}

void run_gmac_bounds(double p1, double p2, double sigma2, double rho, bool as_json) {
  TransmissionBounds b = relaxed_bounds(GmacSpec{p1, p2, sigma2}, rho);
  emit(json{{"b1", b.b1}, {"b2", b.b2}, {"b12", b.b12}}, as_json);
}

struct RhoIntervalFlags {
  std::string fixture;
  double p1 = 1.0, p2 = 1.0, sigma2 = 1.0;
  double h1g2 = 0.0, h2g1 = 0.0, h12 = 0.0, i12 = 0.0;
  bool have_rates = false;
};

void run_gmac_rho_interval(const RhoIntervalFlags& f, bool as_json) {
  GmacSpec g{f.p1, f.p2, f.sigma2};
  double h1g2 = f.h1g2, h2g1 = f.h2g1, h12 = f.h12, i12 = f.i12;
  if (!f.fixture.empty()) {
    if (f.fixture != "gmac-discrete")
      throw input_error("gmac rho-interval: unknown fixture '" + f.fixture + "'");
    fixtures::GmacDiscreteFixture fx = fixtures::gmac_discrete();
    g = GmacSpec{fx.p1, fx.p2, fx.sigma_n2};
    double h_joint = entropy(fx.source, {"U1", "U2"});
    double h1 = entropy(fx.source, {"U1"});
    double h2 = entropy(fx.source, {"U2"});
    h1g2 = h_joint - h2;
    h2g1 = h_joint - h1;
    h12 = h_joint;
    i12 = h1 + h2 - h_joint;
  } else if (!f.have_rates) {
    throw input_error("gmac rho-interval: pass --fixture or all of --h1g2 --h2g1 --h12 --i12");
  }
  RhoInterval ri = rho_interval(g, h1g2, h2g1, h12, i12);
  emit(json{{"rho_min", ri.rho_min},
            {"rho_max", ri.rho_max},
            {"lemma3_cap", ri.lemma3_cap},
            {"feasible", ri.feasible},
            {"h1_given_2", h1g2},
            {"h2_given_1", h2g1},
            {"h12", h12},
            {"i12", i12}},
       as_json);
}

void write_sweep_csv(const std::string& out, const std::vector<double>& db_grid,
                     const std::vector<SchemePoint>& rows, size_t n_schemes) {
  std::string csv = "snr_db,S,scheme,D1,D2,R1,R2,rho_tilde\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const SchemePoint& p = rows[i];
    csv += fmt(db_grid[i / n_schemes]) + "," + fmt(p.snr) + "," + scheme_name(p.scheme) +
           "," + fmt(p.d1) + "," + fmt(p.d2) + "," + fmt_opt(p.r1) + "," + fmt_opt(p.r2) +
           "," + fmt_opt(p.rho_tilde) + "\n";
  }
  write_text_file(out, csv);
}

void run_gmac_sweep(const std::string& schemes_text, double sigma2, double rho,
                    const std::string& snr_db, const std::string& out,
                    const std::vector<std::string>& argv, uint64_t seed, bool as_json) {
  std::vector<SchemeId> schemes = parse_schemes(schemes_text);
  std::vector<double> db_grid = range_grid(parse_range(snr_db, "--snr-db"));
  std::vector<double> snr_grid;
  snr_grid.reserve(db_grid.size());
  for (double db : db_grid) snr_grid.push_back(std::pow(10.0, db / 10.0));
  std::vector<SchemePoint> rows = sweep(schemes, sigma2, rho, snr_grid);
  write_sweep_csv(out, db_grid, rows, schemes.size());
  write_manifest(out, argv, seed, {out});
  emit(json{{"out", out}, {"rows", rows.size()}, {"schemes", schemes.size()}}, as_json);
}

void run_orth_sweep(const std::string& schemes_text, double rho, const std::string& snr_db,
                    const std::string& out, const std::vector<std::string>& argv,
                    uint64_t seed, bool as_json) {
  std::vector<double> db_grid = range_grid(parse_range(snr_db, "--snr-db"));
  std::vector<std::string> schemes;
  for (const auto& s : split(schemes_text, ','))
    if (!s.empty()) {
      if (s != "af" && s != "sb") throw input_error("orthogonal sweep: scheme must be af or sb");
      schemes.push_back(s);
    }
  if (schemes.empty()) throw input_error("--schemes: empty list");

  std::string csv = "snr_db,S,scheme,D1,D2,R1,R2,rho_tilde\n";
  size_t rows = 0;
  for (double db : db_grid) {
    double snr = std::pow(10.0, db / 10.0);
    for (const auto& s : schemes) {
      if (s == "af") {
        DistortionPair d =
            af_distortion_orth(GaussianSourcePair{1.0, 1.0, rho},
                               OrthogonalSpec{snr, snr, 1.0, 1.0});
        csv += fmt(db) + "," + fmt(snr) + ",af," + fmt(d.d1) + "," + fmt(d.d2) + ",,,\n";
      } else {
        double d = sb_distortion_orth_symmetric(rho, snr);
        double rate = 0.5 * std::log2(1.0 + snr);
        csv += fmt(db) + "," + fmt(snr) + ",sb," + fmt(d) + "," + fmt(d) + "," +
               fmt(rate) + "," + fmt(rate) + ",\n";
      }
      ++rows;
    }
  }
  write_text_file(out, csv);
  write_manifest(out, argv, seed, {out});
  emit(json{{"out", out}, {"rows", rows}}, as_json);
}

void run_orth_si_optimize(double rho, double p, double sigma2, double s1, double s2,
                          const std::string& mode_text, bool as_json) {
  SiMode mode;
  if (mode_text == "none")
    mode = SiMode::none;
  else if (mode_text == "enc")
    mode = SiMode::enc;
  else if (mode_text == "dec")
    mode = SiMode::dec;
  else if (mode_text == "both")
    mode = SiMode::both;
  else
    throw input_error("--mode must be none, enc, dec, or both");

  GaussianSourcePair src{1.0, 1.0, rho};
  OrthogonalSpec spec{p, p, sigma2, sigma2};
  SideInfoModel si{s1, s2};
  SiOptimum opt = af_si_optimize(src, spec, si, mode);
  bool dec_side = mode == SiMode::dec || mode == SiMode::both;
  DistortionPair d = af_si_distortion(src, spec, si, opt.combiner, dec_side);
  emit(json{{"mode", mode_text},
            {"a1", opt.combiner.a1},
            {"b1", opt.combiner.b1},
            {"a2", opt.combiner.a2},
            {"b2", opt.combiner.b2},
            {"avg_distortion", opt.avg_distortion},
            {"d1", d.d1},
            {"d2", d.d2}},
       as_json);
}

void run_orth_tdma(double p1, double p2, double n1, double n2, double alpha, bool as_json) {
  OrthogonalSpec spec{p1, p2, n1, n2};
  TransmissionBounds t = tdma_bounds(spec, alpha);
  TransmissionBounds sep = separation_bounds(spec);
  emit(json{{"alpha", alpha},
            {"b1", t.b1},
            {"b2", t.b2},
            {"b12", t.b12},
            {"separation_b12", sep.b12}},
       as_json);
}

struct CodebookFitFlags {
  std::string fixture, source_path;
  double rho = 0.0;
  std::string counts = "2";
  int starts = 20;
  int max_iterations = 300;
  double tolerance = 1e-10;
  std::string out;
};

void run_codebook_fit(const CodebookFitFlags& f, const std::vector<std::string>& argv,
                      uint64_t seed, bool as_json) {
  Pmf source = [&] {
    if (!f.fixture.empty()) {
      if (f.fixture != "gmac-discrete")
        throw input_error("codebook fit: unknown fixture '" + f.fixture + "'");
      return fixtures::gmac_discrete_pmf();
    }
    if (f.source_path.empty())
      throw input_error("codebook fit: pass --fixture or --source");
    return pmf_from_json(read_text_file(f.source_path));
  }();

  detail::SourceTable st = detail::source_table(source);
  FitProblem problem{.target_rho = f.rho,
                     .source = source,
                     .counts1 = parse_counts(f.counts, static_cast<size_t>(st.n1)),
                     .counts2 = parse_counts(f.counts, static_cast<size_t>(st.n2)),
                     .starts = f.starts,
                     .max_iterations = f.max_iterations,
                     .tolerance = f.tolerance,
                     .seed = seed};
  FitResult res = fit(problem);
  write_text_file(f.out, codebook_to_json(res.codebook) + "\n");
  write_manifest(f.out, argv, seed, {f.out});
  emit(json{{"out", f.out},
            {"objective", res.objective},
            {"normalized_distortion", res.normalized_distortion},
            {"constraint_residuals", res.constraint_residuals},
            {"correlation", induced_correlation(res.codebook)}},
       as_json);
}

void run_codebook_validate(const std::string& in, bool as_json) {
  MixtureCodebook cb = codebook_from_json(read_text_file(in));
  json j;
  j["valid"] = true;
  j["correlation"] = induced_correlation(cb);
  j["symbols1"] = cb.users[0].size();
  j["symbols2"] = cb.users[1].size();
  emit(j, as_json);
}

void run_codebook_sample(const std::string& in, int64_t n, const std::string& out,
                         const std::vector<std::string>& argv, uint64_t seed,
                         bool as_json) {
  if (n < 1) throw input_error("codebook sample: --n must be positive");
  MixtureCodebook cb = codebook_from_json(read_text_file(in));
  CounterRng rng(seed, 0);
  std::string csv = "u1,u2,x1,x2\n";
  for (int64_t i = 0; i < n; ++i) {
    CodebookSample s = sample_pair(cb, rng);
    csv += std::to_string(s.u1) + "," + std::to_string(s.u2) + "," + fmt(s.x1) + "," +
           fmt(s.x2) + "\n";
  }
  write_text_file(out, csv);
  write_manifest(out, argv, seed, {out});
  emit(json{{"out", out}, {"n", n}}, as_json);
}

void run_fading_csir(const FadingFlags& ff, double p, double sigma2, int64_t n_mc,
                     bool subsets, uint64_t seed, bool as_json) {
  FadingModel model = build_fading(ff);
  CsirResult res = csir_sum_rate(model, p, sigma2, n_mc, seed);
  json j{{"rate", res.rate},
         {"se", res.se},
         {"upper_bound", res.upper_bound},
         {"n", res.n},
         {"seed", seed}};
  if (subsets) j["subset_bounds"] = csir_subset_bounds(model, p, sigma2, n_mc, seed);
  emit(j, as_json);
}

void run_fading_waterfill(const FadingFlags& ff, double p_avg, bool as_json) {
  FadingModel model = build_fading(ff);
  emit(json{{"lambda", waterfill_lambda(model, p_avg)}, {"p_avg", p_avg}}, as_json);
}

void run_fading_csit(const FadingFlags& ff, double p_avg, double sigma2, bool as_json) {
  FadingModel model = build_fading(ff);
  emit(json{{"rate", csit_sum_rate(model, p_avg, sigma2)},
            {"lambda", waterfill_lambda(model, p_avg)},
            {"p_avg", p_avg}},
       as_json);
}

void run_feedback_region(double p1, double p2, double sigma2, const std::string& rho_grid,
                         const std::string& out, const std::vector<std::string>& argv,
                         uint64_t seed, bool as_json) {
  std::vector<double> grid = range_grid(parse_range(rho_grid, "--rho-grid"));
  std::vector<BoundaryVertex> verts = ozarow_boundary(p1, p2, sigma2, grid);
  std::string csv = "rho,corner,R1,R2\n";
  double best_sum = -1.0, best_rho = 0.0;
  for (const auto& v : verts) {
    csv += fmt(v.rho) + "," + std::to_string(v.corner) + "," + fmt(v.r1) + "," +
           fmt(v.r2) + "\n";
    if (v.r1 + v.r2 > best_sum) {
      best_sum = v.r1 + v.r2;
      best_rho = v.rho;
    }
  }
  write_text_file(out, csv);
  write_manifest(out, argv, seed, {out});
  emit(json{{"out", out},
            {"vertices", verts.size()},
            {"best_sum_rate", best_sum},
            {"best_rho", best_rho}},
       as_json);
}

json report_sim(const SimResult& r, uint64_t seed) {
  return json{{"d1", r.d1},     {"d2", r.d2},           {"se1", r.se1},
              {"se2", r.se2},   {"n", r.n},             {"d1_closed", r.d1_closed},
              {"d2_closed", r.d2_closed}, {"z1", r.z1}, {"z2", r.z2},
              {"seed", seed}};
}

void run_sim_af_gmac(double rho, double v1, double v2, double p1, double p2, double noise,
                     const SimConfig& cfg, bool as_json) {
  SimResult r = simulate_af_gmac(GaussianSourcePair{v1, v2, rho}, GmacSpec{p1, p2, noise},
                                 cfg);
  emit(report_sim(r, cfg.seed), as_json);
}

struct OrthSimFlags {
  double rho = 0.0, p1 = 1.0, p2 = 1.0, noise1 = 1.0, noise2 = 1.0;
  double s1 = 0.0, s2 = 0.0;
  double a1 = 1.0, b1 = 0.0, a2 = 1.0, b2 = 0.0;
  bool has_si = false, has_comb = false, decoder_si = false;
};

void run_sim_af_orth(const OrthSimFlags& f, const SimConfig& cfg, bool as_json) {
  std::optional<SideInfoModel> si;
  if (f.has_si) si = SideInfoModel{f.s1, f.s2};
  std::optional<LinearCombiner> comb;
  if (f.has_comb) comb = LinearCombiner{f.a1, f.b1, f.a2, f.b2};
  SimResult r = simulate_af_orth(GaussianSourcePair{1.0, 1.0, f.rho},
                                 OrthogonalSpec{f.p1, f.p2, f.noise1, f.noise2}, si, comb,
                                 f.decoder_si, cfg);
  emit(report_sim(r, cfg.seed), as_json);
}

void run_replay(const std::string& manifest_path) {
  json j;
  try {
    j = json::parse(read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw input_error(std::string("replay manifest: ") + e.what());
  }
  if (!j.contains("argv") || !j["argv"].is_array())
    throw input_error("replay manifest: missing argv");
  std::vector<std::string> argv;
  for (const auto& a : j["argv"]) argv.push_back(a.get<std::string>());
  int code = dispatch(argv);
  if (code != 0) throw input_error("replay: recorded command exited " + std::to_string(code));
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"rate/distortion feasibility and joint source-channel schemes toolbox"};
  app.set_version_flag("--version", kLibraryVersion);
  app.require_subcommand(1);
  // Lets --json / --seed / --threads appear after the subcommand name.
  app.fallthrough();

  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable stdout");
  uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value, "rng seed (beats MACJSCC_SEED, default 0)");
  int threads = 0;

  // region
  CLI::App* region = app.add_subcommand("region", "admissibility condition checks");
  region->require_subcommand(1);
  {
    CLI::App* cmd = region->add_subcommand("example", "named fixture report");
    auto name = std::make_shared<std::string>();
    auto si = std::make_shared<std::string>("full");
    auto maps = std::make_shared<std::string>("uniform");
    auto d1 = std::make_shared<double>(0.0);
    auto d2 = std::make_shared<double>(0.0);
    cmd->add_option("--name", *name, "fixture name")->required();
    cmd->add_option("--si", *si, "decoder side information: none,z1,z1z2,v,full");
    cmd->add_option("--maps", *maps, "channel maps: identity,uniform");
    cmd->add_option("--d1", *d1, "distortion limit, source 1");
    cmd->add_option("--d2", *d2, "distortion limit, source 2");
    cmd->callback([=, &as_json] { run_region_example(*name, *si, *maps, *d1, *d2, as_json); });
  }
  {
    CLI::App* cmd = region->add_subcommand("check", "check a system given as json files");
    auto f = std::make_shared<RegionCheckFlags>();
    cmd->add_option("--source", f->source, "joint source pmf json")->required();
    cmd->add_option("--quantizer1", f->q1, "p(W1|U1,Z1) kernel json")->required();
    cmd->add_option("--quantizer2", f->q2, "p(W2|U2,Z2) kernel json")->required();
    cmd->add_option("--map1", f->m1, "p(X1|W1) kernel json")->required();
    cmd->add_option("--map2", f->m2, "p(X2|W2) kernel json")->required();
    cmd->add_option("--channel", f->channel, "p(Y|X1,X2) kernel json")->required();
    cmd->add_option("--measure1", f->measure1, "hamming or squared");
    cmd->add_option("--measure2", f->measure2, "hamming or squared");
    cmd->add_option("--limit1", f->limit1, "distortion limit, source 1");
    cmd->add_option("--limit2", f->limit2, "distortion limit, source 2");
    CLI::Option* jl = cmd->add_option("--joint-limit", f->joint_limit, "cap on D1+D2");
    cmd->callback([=, &as_json] {
      f->has_joint = jl->count() > 0;
      run_region_check(*f, as_json);
    });
  }

  // gmac
  CLI::App* gmac = app.add_subcommand("gmac", "adder-channel schemes and bounds");
  gmac->require_subcommand(1);
  {
    CLI::App* cmd = gmac->add_subcommand("bounds", "rate bounds at a channel correlation");
    auto p1 = std::make_shared<double>(1.0);
    auto p2 = std::make_shared<double>(1.0);
    auto s2 = std::make_shared<double>(1.0);
    auto rho = std::make_shared<double>(0.0);
    cmd->add_option("--p1", *p1, "user 1 power")->required();
    cmd->add_option("--p2", *p2, "user 2 power")->required();
    cmd->add_option("--sigma2", *s2, "noise variance");
    cmd->add_option("--rho", *rho, "channel input correlation")->required();
    cmd->callback([=, &as_json] { run_gmac_bounds(*p1, *p2, *s2, *rho, as_json); });
  }
  {
    CLI::App* cmd = gmac->add_subcommand("rho-interval", "feasible input correlations");
    auto f = std::make_shared<RhoIntervalFlags>();
    cmd->add_option("--fixture", f->fixture, "named source fixture");
    cmd->add_option("--p1", f->p1, "user 1 power");
    cmd->add_option("--p2", f->p2, "user 2 power");
    cmd->add_option("--sigma2", f->sigma2, "noise variance");
    CLI::Option* a = cmd->add_option("--h1g2", f->h1g2, "H(U1|U2) bits");
    CLI::Option* b = cmd->add_option("--h2g1", f->h2g1, "H(U2|U1) bits");
    CLI::Option* c = cmd->add_option("--h12", f->h12, "H(U1,U2) bits");
    CLI::Option* d = cmd->add_option("--i12", f->i12, "I(U1;U2) bits");
    cmd->callback([=, &as_json] {
      f->have_rates = a->count() && b->count() && c->count() && d->count();
      run_gmac_rho_interval(*f, as_json);
    });
  }
  {
    CLI::App* cmd = gmac->add_subcommand("sweep", "distortion vs snr csv");
    auto schemes = std::make_shared<std::string>("af,sb,lt,nc");
    auto sigma2 = std::make_shared<double>(1.0);
    auto rho = std::make_shared<double>(0.0);
    auto snr_db = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--schemes", *schemes, "comma list of af,sb,lt,nc");
    cmd->add_option("--sigma2", *sigma2, "source variance");
    cmd->add_option("--rho", *rho, "source correlation")->required();
    cmd->add_option("--snr-db", *snr_db, "min:max:step in dB")->required();
    cmd->add_option("--out", *out, "csv path")->required();
    cmd->callback([=, &args, &as_json, &seed_value] {
      run_gmac_sweep(*schemes, *sigma2, *rho, *snr_db, *out, args,
                     resolve_seed(seed_opt, seed_value), as_json);
    });
  }

  // orthogonal
  CLI::App* orth = app.add_subcommand("orthogonal", "per-user channel schemes");
  orth->require_subcommand(1);
  {
    CLI::App* cmd = orth->add_subcommand("sweep", "distortion vs snr csv");
    auto schemes = std::make_shared<std::string>("af,sb");
    auto rho = std::make_shared<double>(0.0);
    auto snr_db = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--schemes", *schemes, "comma list of af,sb");
    cmd->add_option("--rho", *rho, "source correlation")->required();
    cmd->add_option("--snr-db", *snr_db, "min:max:step in dB")->required();
    cmd->add_option("--out", *out, "csv path")->required();
    cmd->callback([=, &args, &as_json, &seed_value] {
      run_orth_sweep(*schemes, *rho, *snr_db, *out, args,
                     resolve_seed(seed_opt, seed_value), as_json);
    });
  }
  {
    CLI::App* cmd = orth->add_subcommand("si-optimize", "best side-observation combiner");
    auto rho = std::make_shared<double>(0.0);
    auto p = std::make_shared<double>(1.0);
    auto sigma2 = std::make_shared<double>(1.0);
    auto s1 = std::make_shared<double>(0.0);
    auto s2 = std::make_shared<double>(0.0);
    auto mode = std::make_shared<std::string>("both");
    cmd->add_option("--rho", *rho, "source correlation")->required();
    cmd->add_option("--p", *p, "per-user power")->required();
    cmd->add_option("--sigma2", *sigma2, "per-channel noise variance");
    cmd->add_option("--s1", *s1, "user 1 observation gain")->required();
    cmd->add_option("--s2", *s2, "user 2 observation gain")->required();
    cmd->add_option("--mode", *mode, "none, enc, dec, or both");
    cmd->callback([=, &as_json] {
      run_orth_si_optimize(*rho, *p, *sigma2, *s1, *s2, *mode, as_json);
    });
  }
  {
    CLI::App* cmd = orth->add_subcommand("tdma", "time-split rate bounds");
    auto p1 = std::make_shared<double>(1.0);
    auto p2 = std::make_shared<double>(1.0);
    auto n1 = std::make_shared<double>(1.0);
    auto n2 = std::make_shared<double>(1.0);
    auto alpha = std::make_shared<double>(0.5);
    cmd->add_option("--p1", *p1, "user 1 power")->required();
    cmd->add_option("--p2", *p2, "user 2 power")->required();
    cmd->add_option("--noise1", *n1, "channel 1 noise variance");
    cmd->add_option("--noise2", *n2, "channel 2 noise variance");
    cmd->add_option("--alpha", *alpha, "fraction of time for user 1")->required();
    cmd->callback([=, &as_json] { run_orth_tdma(*p1, *p2, *n1, *n2, *alpha, as_json); });
  }

  // codebook
  CLI::App* codebook = app.add_subcommand("codebook", "mixture codebook design");
  codebook->require_subcommand(1);
  {
    CLI::App* cmd = codebook->add_subcommand("fit", "fit a correlation-preserving codebook");
    auto f = std::make_shared<CodebookFitFlags>();
    cmd->add_option("--fixture", f->fixture, "named source fixture");
    cmd->add_option("--source", f->source_path, "source pmf json path");
    cmd->add_option("--rho", f->rho, "target input correlation")->required();
    cmd->add_option("--counts", f->counts, "components per symbol (single int or comma list)");
    cmd->add_option("--starts", f->starts, "multistart count");
    cmd->add_option("--max-iterations", f->max_iterations, "inner iterations per stage");
    cmd->add_option("--tolerance", f->tolerance, "relative convergence tolerance");
    cmd->add_option("--out", f->out, "codebook json path")->required();
    cmd->callback([=, &args, &as_json, &seed_value] {
      run_codebook_fit(*f, args, resolve_seed(seed_opt, seed_value), as_json);
    });
  }
  {
    CLI::App* cmd = codebook->add_subcommand("validate", "load and validate a codebook");
    auto in = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "codebook json path")->required();
    cmd->callback([=, &as_json] { run_codebook_validate(*in, as_json); });
  }
  {
    CLI::App* cmd = codebook->add_subcommand("sample", "draw channel input pairs");
    auto in = std::make_shared<std::string>();
    auto n = std::make_shared<int64_t>(1000);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "codebook json path")->required();
    cmd->add_option("--n", *n, "number of draws");
    cmd->add_option("--out", *out, "csv path")->required();
    cmd->callback([=, &args, &as_json, &seed_value] {
      run_codebook_sample(*in, *n, *out, args, resolve_seed(seed_opt, seed_value), as_json);
    });
  }

  // fading
  CLI::App* fading = app.add_subcommand("fading", "fading adder channel rates");
  fading->require_subcommand(1);
  {
    CLI::App* cmd = fading->add_subcommand("csir", "receiver-only knowledge sum rate");
    auto ff = std::make_shared<FadingFlags>();
    add_fading_flags(cmd, *ff);
    auto p = std::make_shared<double>(1.0);
    auto s2 = std::make_shared<double>(1.0);
    auto n_mc = std::make_shared<int64_t>(200000);
    auto subsets = std::make_shared<bool>(false);
    cmd->add_option("--p", *p, "per-user power");
    cmd->add_option("--sigma2", *s2, "noise variance");
    cmd->add_option("--n-mc", *n_mc, "monte carlo sample count");
    cmd->add_flag("--subsets", *subsets, "also report per-subset-size bounds");
    cmd->callback([=, &as_json, &seed_value] {
      run_fading_csir(*ff, *p, *s2, *n_mc, *subsets, resolve_seed(seed_opt, seed_value),
                      as_json);
    });
  }
  {
    CLI::App* cmd = fading->add_subcommand("waterfill", "best-user policy threshold");
    auto ff = std::make_shared<FadingFlags>();
    add_fading_flags(cmd, *ff);
    auto p_avg = std::make_shared<double>(1.0);
    cmd->add_option("--p-avg", *p_avg, "average power budget")->required();
    cmd->callback([=, &as_json] { run_fading_waterfill(*ff, *p_avg, as_json); });
  }
  {
    CLI::App* cmd = fading->add_subcommand("csit", "transmitter-side knowledge sum rate");
    auto ff = std::make_shared<FadingFlags>();
    add_fading_flags(cmd, *ff);
    auto p_avg = std::make_shared<double>(1.0);
    auto s2 = std::make_shared<double>(1.0);
    cmd->add_option("--p-avg", *p_avg, "average power budget")->required();
    cmd->add_option("--sigma2", *s2, "noise variance");
    cmd->callback([=, &as_json] { run_fading_csit(*ff, *p_avg, *s2, as_json); });
  }

  // feedback
  CLI::App* feedback = app.add_subcommand("feedback", "feedback capacity region");
  feedback->require_subcommand(1);
  {
    CLI::App* cmd = feedback->add_subcommand("region", "pentagon corners over a rho grid");
    auto p1 = std::make_shared<double>(1.0);
    auto p2 = std::make_shared<double>(1.0);
    auto s2 = std::make_shared<double>(1.0);
    auto grid = std::make_shared<std::string>("0:1:0.01");
    auto out = std::make_shared<std::string>();
    cmd->add_option("--p1", *p1, "user 1 power")->required();
    cmd->add_option("--p2", *p2, "user 2 power")->required();
    cmd->add_option("--sigma2", *s2, "noise variance");
    cmd->add_option("--rho-grid", *grid, "min:max:step over correlations");
    cmd->add_option("--out", *out, "csv path")->required();
    cmd->callback([=, &args, &as_json, &seed_value] {
      run_feedback_region(*p1, *p2, *s2, *grid, *out, args,
                          resolve_seed(seed_opt, seed_value), as_json);
    });
  }

  // simulate
  CLI::App* simulate = app.add_subcommand("simulate", "seeded monte carlo checks");
  simulate->require_subcommand(1);
  auto sim_cfg = [&](CLI::App* cmd, auto n, auto batch) {
    cmd->add_option("--n", *n, "sample count");
    cmd->add_option("--batch", *batch, "samples per rng substream");
    cmd->add_option("--threads", threads, "worker cap, 0 = hardware");
  };
  {
    CLI::App* cmd = simulate->add_subcommand("af-gmac", "uncoded adder-channel run");
    auto rho = std::make_shared<double>(0.0);
    auto v1 = std::make_shared<double>(1.0);
    auto v2 = std::make_shared<double>(1.0);
    auto p1 = std::make_shared<double>(1.0);
    auto p2 = std::make_shared<double>(1.0);
    auto noise = std::make_shared<double>(1.0);
    auto n = std::make_shared<int64_t>(1000000);
    auto batch = std::make_shared<int64_t>(65536);
    cmd->add_option("--rho", *rho, "source correlation")->required();
    cmd->add_option("--var1", *v1, "source 1 variance");
    cmd->add_option("--var2", *v2, "source 2 variance");
    cmd->add_option("--p1", *p1, "user 1 power")->required();
    cmd->add_option("--p2", *p2, "user 2 power")->required();
    cmd->add_option("--noise", *noise, "channel noise variance");
    sim_cfg(cmd, n, batch);
    cmd->callback([=, &as_json, &threads, &seed_value] {
      SimConfig cfg{resolve_seed(seed_opt, seed_value), *n, *batch, threads};
      run_sim_af_gmac(*rho, *v1, *v2, *p1, *p2, *noise, cfg, as_json);
    });
  }
  {
    CLI::App* cmd = simulate->add_subcommand("af-orth", "uncoded per-user channel run");
    auto f = std::make_shared<OrthSimFlags>();
    auto n = std::make_shared<int64_t>(1000000);
    auto batch = std::make_shared<int64_t>(65536);
    cmd->add_option("--rho", f->rho, "source correlation")->required();
    cmd->add_option("--p1", f->p1, "user 1 power")->required();
    cmd->add_option("--p2", f->p2, "user 2 power")->required();
    cmd->add_option("--noise1", f->noise1, "channel 1 noise variance");
    cmd->add_option("--noise2", f->noise2, "channel 2 noise variance");
    CLI::Option* s1 = cmd->add_option("--s1", f->s1, "user 1 observation gain");
    CLI::Option* s2 = cmd->add_option("--s2", f->s2, "user 2 observation gain");
    CLI::Option* a1 = cmd->add_option("--a1", f->a1, "combiner source weight 1");
    CLI::Option* b1 = cmd->add_option("--b1", f->b1, "combiner observation weight 1");
    CLI::Option* a2 = cmd->add_option("--a2", f->a2, "combiner source weight 2");
    CLI::Option* b2 = cmd->add_option("--b2", f->b2, "combiner observation weight 2");
    cmd->add_flag("--decoder-si", f->decoder_si, "decoder also sees the observations");
    sim_cfg(cmd, n, batch);
    cmd->callback([=, &as_json, &threads, &seed_value] {
      f->has_si = s1->count() || s2->count();
      f->has_comb = a1->count() || b1->count() || a2->count() || b2->count();
      SimConfig cfg{resolve_seed(seed_opt, seed_value), *n, *batch, threads};
      run_sim_af_orth(*f, cfg, as_json);
    });
  }

  // replay
  {
    CLI::App* cmd = app.add_subcommand("replay", "re-run a recorded manifest");
    auto manifest = std::make_shared<std::string>();
    cmd->add_option("--manifest", *manifest, "manifest json path")->required();
    cmd->callback([=] { run_replay(*manifest); });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const input_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
