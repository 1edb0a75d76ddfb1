// psitree: command-line front end.
//
// Subcommands map 1:1 onto the library's operations:
//   sequence    evaluate a family's defining recurrence
//   bracket     positivity-induction upper bound for the binary-equality rho
//   ars         resonance polynomial + Frobenius compatibility verdict
//   solve       two-point connection solve for (rho, c_r)
//   expand      symbolic asymptotic expansion of the normalized coefficients
//   validate    numeric check of an expansion against the recurrence oracle
//   integrable  quadrature closed forms for the integrable cases (nu = 1, 2)
//   mgf         moment generating function values vs the three-term formula
//
// Reports are JSON ("schema": 1) with numbers as decimal strings plus
// precision tags, or CSV (header row, LF) for plottable row data. Two runs
// with the same inputs produce byte-identical reports; `--from-report` re-runs
// a previous JSON report from its echoed inputs.
//
// Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 unsupported.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psitree/asymptotic.hpp"
#include "psitree/connection.hpp"
#include "psitree/integrable.hpp"
#include "psitree/resonance.hpp"
#include "psitree/sequences.hpp"

using json = nlohmann::json;
using namespace psitree;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All options of all subcommands; `inputs` echoes exactly the fields the
// executed subcommand consumed, so a report replays from them alone.
struct Cfg {
  std::string cmd;
  std::string family = "bst";
  long d = 2, m = 2, t = 0, nu = 1;
  std::string omega = "1";    // Partition weight (rational)
  std::string beta = "1/2";   // RelaxedKd exponent (rational in (0,1))
  long n_max = 50;
  long n0 = 10;
  long n_lo = 200, n_hi = 1000;
  long order = 6;
  long series_order = 5;
  long precision = 512;
  long digits = 15;
  std::string beta_split = "1/2";
  std::string c_r = "0";
  std::string rho;                 // mgf: skip the embedded solve if given
  std::vector<std::string> z;      // mgf sample points (rationals)
  bool numeric = false;            // sequence: force floating point
  bool compare_paper = false;
  std::string format = "json";
  std::string output;
};

Family make_family(const Cfg& c) {
  if (c.family == "bst") return Family::bst(c.d);
  if (c.family == "mary") return Family::mary(c.m);
  if (c.family == "fringe") return Family::fringe(c.t);
  if (c.family == "phylo") return Family::phylo();
  if (c.family == "quadtree") return Family::quadtree();
  if (c.family == "relaxed-kd")
    return Family::relaxed_kd(BigReal(Rational(c.beta), 192));
  if (c.family == "partition")
    return Family::partition(c.d, BigReal(Rational(c.omega), 192));
  if (c.family == "boltzmann") return Family::boltzmann(c.nu);
  throw UsageError("unknown family: " + c.family);
}

json family_inputs(const Cfg& c) {
  json j;
  j["family"] = c.family;
  if (c.family == "bst" || c.family == "partition") j["d"] = c.d;
  if (c.family == "mary") j["m"] = c.m;
  if (c.family == "fringe") j["t"] = c.t;
  if (c.family == "boltzmann") j["nu"] = c.nu;
  if (c.family == "partition") j["omega"] = c.omega;
  if (c.family == "relaxed-kd") j["beta"] = c.beta;
  return j;
}

json tagged(const BigReal& x, long digits, long prec) {
  return json{{"decimal", x.to_string(digits)}, {"precision_bits", prec}};
}

json series_json(const FormalSeries& s) {
  json coeffs = json::array();
  for (const auto& q : s.coeffs) coeffs.push_back(q.to_string());
  return json{{"base_exp", s.base_exp.to_string()},
              {"step", s.step.to_string()},
              {"coefficients", coeffs}};
}

// --- sequence ---------------------------------------------------------------

json run_sequence(const Cfg& c, std::string* csv) {
  Family f = make_family(c);
  bool exact = !c.numeric && f.exact_capable();
  SequenceSlice s = sequence(f, c.n_max, exact, c.precision);
  json rows = json::array();
  std::ostringstream os;
  os << "n,value\n";
  for (long n = 0; n < s.size(); ++n) {
    std::string v =
        exact ? s.rat(n).to_string() : s.num(n, c.precision).to_string(c.digits);
    rows.push_back(json{{"n", n}, {"value", v}});
    os << n << "," << v << "\n";
  }
  if (csv) *csv = os.str();
  json res;
  res["exact"] = exact;
  if (!exact) res["precision_bits"] = c.precision;
  res["values"] = rows;
  return res;
}

// --- bracket ----------------------------------------------------------------

json run_bracket(const Cfg& c, std::string*) {
  Family f = make_family(c);
  BigReal b = bracket_rho(f, c.n0, c.precision);
  json res;
  res["n0"] = c.n0;
  res["bound"] = tagged(b, c.digits, c.precision);
  res["bound_truncated_4"] = truncate_decimal(b, 4);
  return res;
}

// --- ars --------------------------------------------------------------------

json run_ars(const Cfg& c, std::string*) {
  Family f = make_family(c);
  ResonanceReport rr = resonance_polynomial(f);
  json res;
  json phi = json::array();
  for (const auto& q : rr.phi) phi.push_back(q.to_string());
  res["phi"] = phi;
  res["resonances"] = rr.integer_resonances;
  res["minus_one_root"] = rr.minus_one_root;
  if (f.exact_capable() && !rr.integer_resonances.empty()) {
    CompatibilityReport cr =
        frobenius_and_compatibility(f, rr.integer_resonances.front());
    res["verdict"] = verdict_name(cr.verdict);
    res["residual"] = cr.residual.to_string();
    res["normalization"] = cr.normalization;
    json fc = json::array();
    for (const auto& q : cr.frobenius_coefficients) fc.push_back(q.to_string());
    res["frobenius_coefficients"] = fc;
  }
  return res;
}

// --- solve ------------------------------------------------------------------

// Reference digit strings for --compare-paper (as printed in the source
// article; the quadtree entry is reliable to 15 significant digits only).
struct RefEntry {
  const char* family;
  const char* quantity;
  const char* value;
  long digits;
};
const RefEntry kReferences[] = {
    {"bst(d=2)", "rho", "3.14085756720293695160", 18},
    {"bst(d=2)", "c_natural", "-0.00150849820940593425", 12},
    {"fringe(t=0)", "rho", "3.14085756720293695160", 18},
    {"fringe(t=0)", "c_natural", "-0.00150849820940593425", 12},
    {"phylo", "rho", "1.5704287836014684758040837", 20},
    {"quadtree", "rho", "1.37649444105715625755", 15},
    {"boltzmann(nu=2)", "rho", "5.51370157671056775506", 18},
};

long matched_digits(const BigReal& x, const std::string& ref, long prec) {
  BigReal r(ref, prec);
  if (r.is_zero()) return x.is_zero() ? 99 : 0;
  BigReal rel = ((x.round_to(prec) - r) / r).abs();
  if (rel.is_zero()) return 99;
  double lg = -std::log10(std::abs(rel.to_double()));
  if (rel.to_double() == 0) lg = 99;
  return lg < 0 ? 0 : static_cast<long>(lg);
}

json run_solve(const Cfg& c, std::string*) {
  Family f = make_family(c);
  ConnectionSolution sol =
      solve_connection(f, c.digits, Rational(c.beta_split),
                       c.precision > 0 ? c.precision : 0);
  long p = sol.precision;
  json res;
  res["rho"] = tagged(sol.rho, 0, p);
  res["c_r"] = tagged(sol.c_r, 0, p);
  res["c_natural"] = tagged(sol.c_natural, 0, p);
  res["resonance"] = sol.resonance;
  res["z0"] = tagged(sol.z0, 0, p);
  res["n_terms"] = sol.n_terms;
  res["m_modes"] = sol.m_modes;
  res["iterations"] = sol.iterations;
  res["residuals"] = json{{"value", tagged(sol.residual_value, 8, p)},
                          {"derivative", tagged(sol.residual_derivative, 8, p)}};
  res["tail_bounds"] = tagged(sol.error_estimate, 8, p);
  if (c.compare_paper) {
    json table = json::array();
    std::string name = f.name();
    for (const RefEntry& e : kReferences) {
      if (name != e.family) continue;
      const BigReal& use = std::string(e.quantity) == "rho" ? sol.rho
                                                            : sol.c_natural;
      long md = matched_digits(use, e.value, p);
      long need = std::min<long>(e.digits, c.digits);
      table.push_back(json{{"quantity", e.quantity},
                           {"reference", e.value},
                           {"computed", use.to_string(e.digits + 4)},
                           {"matched_digits", md},
                           {"pass", md >= need}});
    }
    res["compare_paper"] = table;
  }
  return res;
}

// --- expand -----------------------------------------------------------------

json terms_json_cpoly(const Expansion<CPoly>& ex) {
  json terms = json::array();
  for (const auto& t : ex.terms) {
    json jt{{"exp", t.exp}, {"hn", t.hn}};
    jt["coeff"] = t.coeff.coeff(0).to_string();
    if (t.coeff.degree() >= 1) jt["coeff_c"] = t.coeff.coeff(1).to_string();
    terms.push_back(jt);
  }
  return terms;
}

json run_expand(const Cfg& c, std::string*) {
  Family f = make_family(c);
  json res;
  if (f.exact_capable()) {
    FieldTraits<CPoly>::Ctx ctx;
    Expansion<CPoly> ex =
        build_expansion<CPoly>(f, c.order, ctx, CPoly::c_times(Rational(1)));
    res["field"] = "rational, symbolic free constant c";
    res["alpha"] = ex.alpha;
    res["order"] = ex.order;
    res["modes_used"] = ex.modes_used;
    res["terms"] = terms_json_cpoly(ex);
    return res;
  }
  if (f.kind == FamilyKind::QuadtreeMoments ||
      (f.kind == FamilyKind::Partition && f.d == 2 &&
       Rational(c.omega) == Rational(1))) {
    FieldTraits<AlgElem>::Ctx ctx{quadtree_alg_ctx(c.precision)};
    AlgElem cr = AlgElem::from_rational(ctx.alg, Rational(c.c_r));
    Expansion<AlgElem> ex = build_expansion<AlgElem>(f, c.order, ctx, cr);
    res["field"] = "Q(v), v^2 + 3v - 2 = 0, v = (sqrt(17) - 3)/2";
    res["alpha"] = ex.alpha;
    res["order"] = ex.order;
    res["modes_used"] = ex.modes_used;
    json terms = json::array();
    for (const auto& t : ex.terms) {
      json jt{{"exp", t.exp}, {"hn", t.hn}};
      jt["coeff"] = t.coeff.coeffs()[0].to_string();
      if (!t.coeff.coeffs()[1].is_zero())
        jt["coeff_v"] = t.coeff.coeffs()[1].to_string();
      terms.push_back(jt);
    }
    res["terms"] = terms;
    return res;
  }
  if (f.kind == FamilyKind::RelaxedKd) {
    FieldTraits<BigReal>::Ctx ctx{c.precision};
    BigReal cr(Rational(c.c_r), c.precision);
    Expansion<BigReal> ex = build_expansion<BigReal>(f, c.order, ctx, cr);
    res["field"] = "floating point";
    res["alpha"] = ex.alpha;
    res["order"] = ex.order;
    res["modes_used"] = ex.modes_used;
    json terms = json::array();
    for (const auto& t : ex.terms)
      terms.push_back(json{{"exp", t.exp},
                           {"hn", t.hn},
                           {"coeff", tagged(t.coeff, c.digits, c.precision)}});
    res["terms"] = terms;
    return res;
  }
  throw unsupported_error("expand: no exact coefficient field wired for " +
                          f.name());
}

// --- validate ---------------------------------------------------------------

json validation_json(const ValidationReport& r) {
  return json{{"order", r.order},
              {"n_lo", r.n_lo},
              {"n_hi", r.n_hi},
              {"decay_exponent", r.decay_exponent},
              {"max_scaled_residual", r.max_scaled_residual}};
}

// Per-sample residual rows on the same geometric grid validate_expansion
// uses, for plotting.
template <class F, class Lower>
void residual_rows(const Expansion<F>& ex, const BigReal& rho, long through,
                   long n_lo, long n_hi, long prec, Lower&& lower,
                   std::string* csv) {
  if (!csv) return;
  std::vector<BigReal> w = connection_coeffs(ex.family, n_hi, prec);
  BigReal nu = detail::connection_scale(ex.family, rho.round_to(prec), prec)
                   .first;
  std::vector<long> samples;
  for (double x = n_lo; x <= n_hi + 0.5; x *= 1.25)
    samples.push_back(static_cast<long>(x));
  samples.back() = n_hi;
  std::ostringstream os;
  os << "n,scaled_residual\n";
  BigReal rp = rho.round_to(prec).pow(samples.front());
  long cur = samples.front();
  for (long n : samples) {
    for (; cur < n; ++cur) rp = rp * rho;
    BigReal oracle = nu * w[n] * rp;
    BigReal pred = eval_expansion(ex, n, through, prec, lower);
    double r = (oracle - pred).abs().to_double() *
               std::pow(static_cast<double>(n), static_cast<double>(through));
    os << n << "," << r << "\n";
  }
  *csv = os.str();
}

json run_validate(const Cfg& c, std::string* csv) {
  Family f = make_family(c);
  ConnectionSolution sol =
      solve_connection(f, c.digits, Rational(c.beta_split));
  const long prec = c.precision;
  json res;
  res["rho"] = tagged(sol.rho, c.digits + 4, sol.precision);
  if (f.exact_capable()) {
    FieldTraits<Rational>::Ctx ctx;
    Expansion<Rational> ex =
        build_expansion<Rational>(f, c.order, ctx, Rational(c.c_r));
    ValidationReport r =
        validate_expansion(ex, sol.rho, c.order, c.n_lo, c.n_hi, prec);
    res["validation"] = validation_json(r);
    residual_rows(ex, sol.rho, c.order, c.n_lo, c.n_hi, prec,
                  [&](const Rational& q) { return BigReal(q, prec); }, csv);
    return res;
  }
  if (f.kind == FamilyKind::QuadtreeMoments ||
      (f.kind == FamilyKind::Partition && f.d == 2 &&
       Rational(c.omega) == Rational(1))) {
    FieldTraits<AlgElem>::Ctx ctx{quadtree_alg_ctx(prec)};
    AlgElem cr = AlgElem::from_rational(ctx.alg, Rational(c.c_r));
    Expansion<AlgElem> ex = build_expansion<AlgElem>(f, c.order, ctx, cr);
    auto lower = [&](const AlgElem& a) { return a.to_bigreal(prec); };
    ValidationReport r =
        validate_expansion(ex, sol.rho, c.order, c.n_lo, c.n_hi, prec, lower);
    res["validation"] = validation_json(r);
    residual_rows(ex, sol.rho, c.order, c.n_lo, c.n_hi, prec, lower, csv);
    return res;
  }
  if (f.kind == FamilyKind::RelaxedKd) {
    FieldTraits<BigReal>::Ctx ctx{prec};
    Expansion<BigReal> ex =
        build_expansion<BigReal>(f, c.order, ctx, sol.c_r.round_to(prec));
    auto lower = [&](const BigReal& x) { return x; };
    ValidationReport r =
        validate_expansion(ex, sol.rho, c.order, c.n_lo, c.n_hi, prec, lower);
    res["validation"] = validation_json(r);
    residual_rows(ex, sol.rho, c.order, c.n_lo, c.n_hi, prec, lower, csv);
    return res;
  }
  throw unsupported_error("validate: no expansion field wired for " +
                          f.name());
}

// --- integrable ---------------------------------------------------------

json run_integrable(const Cfg& c, std::string* csv) {
  IntegrableSolution sol = integrable_solve(c.nu, c.precision,
                                            static_cast<std::size_t>(
                                                c.series_order));
  json res;
  res["nu"] = c.nu;
  res["zeta_inf"] = tagged(sol.zeta_inf, c.digits, c.precision);
  res["rho"] = tagged(sol.rho, c.digits, c.precision);
  res["delta_series"] = series_json(sol.delta_series);
  res["inverse_series"] = series_json(sol.inverse_series);
  SequenceSlice t = sequence(Family::boltzmann(c.nu), c.n_hi, true);
  json rows = json::array();
  std::ostringstream os;
  os << "n,predicted,exact,rel_error\n";
  for (long n = std::max<long>(1, c.n_lo); n <= c.n_hi; ++n) {
    BigReal pred = integrable_asymptotics(sol, n, c.precision);
    BigReal exact = t.num(n, c.precision);
    BigReal rel = (pred / exact - BigReal(1, c.precision)).abs();
    rows.push_back(json{{"n", n},
                        {"predicted", pred.to_string(c.digits)},
                        {"exact", t.rat(n).to_string()},
                        {"rel_error", rel.to_string(4)}});
    os << n << "," << pred.to_string(c.digits) << "," << t.rat(n).to_string()
       << "," << rel.to_string(4) << "\n";
  }
  res["predictions"] = rows;
  if (csv) *csv = os.str();
  return res;
}

// --- mgf ----------------------------------------------------------------

json run_mgf(const Cfg& c, std::string* csv) {
  BigReal rho(0, c.precision);
  json res;
  if (!c.rho.empty()) {
    rho = BigReal(c.rho, c.precision);
    res["rho"] = json{{"decimal", c.rho}, {"source", "supplied"}};
  } else {
    ConnectionSolution sol = solve_connection(Family::quadtree(), c.digits);
    rho = sol.rho.round_to(c.precision);
    res["rho"] = json{{"decimal", rho.to_string(c.digits + 4)},
                      {"source", "solved"}};
  }
  json rows = json::array();
  std::ostringstream os;
  os << "z,value,approximation,gap\n";
  for (const std::string& zs : c.z) {
    BigReal z(Rational(zs), c.precision);
    MgfPoint p = quadtree_mgf(z, rho, c.precision);
    rows.push_back(json{{"z", zs},
                        {"value", p.value.to_string(c.digits)},
                        {"approximation", p.approximation.to_string(c.digits)},
                        {"gap", p.gap.to_string(6)}});
    os << zs << "," << p.value.to_string(c.digits) << ","
       << p.approximation.to_string(c.digits) << "," << p.gap.to_string(6)
       << "\n";
  }
  res["points"] = rows;
  if (csv) *csv = os.str();
  return res;
}

// --- dispatch ---------------------------------------------------------------

json echo_inputs(const Cfg& c) {
  json in;
  if (c.cmd == "sequence") {
    in = family_inputs(c);
    in["n_max"] = c.n_max;
    in["numeric"] = c.numeric;
    in["precision"] = c.precision;
    in["digits"] = c.digits;
  } else if (c.cmd == "bracket") {
    in = family_inputs(c);
    in["n0"] = c.n0;
    in["precision"] = c.precision;
    in["digits"] = c.digits;
  } else if (c.cmd == "ars") {
    in = family_inputs(c);
  } else if (c.cmd == "solve") {
    in = family_inputs(c);
    in["digits"] = c.digits;
    in["precision"] = c.precision;
    in["beta_split"] = c.beta_split;
    in["compare_paper"] = c.compare_paper;
  } else if (c.cmd == "expand") {
    in = family_inputs(c);
    in["order"] = c.order;
    in["c_r"] = c.c_r;
    in["precision"] = c.precision;
    in["digits"] = c.digits;
  } else if (c.cmd == "validate") {
    in = family_inputs(c);
    in["order"] = c.order;
    in["c_r"] = c.c_r;
    in["n_lo"] = c.n_lo;
    in["n_hi"] = c.n_hi;
    in["digits"] = c.digits;
    in["precision"] = c.precision;
    in["beta_split"] = c.beta_split;
  } else if (c.cmd == "integrable") {
    in["nu"] = c.nu;
    in["series_order"] = c.series_order;
    in["n_lo"] = c.n_lo;
    in["n_hi"] = c.n_hi;
    in["precision"] = c.precision;
    in["digits"] = c.digits;
  } else if (c.cmd == "mgf") {
    in["z"] = c.z;
    in["rho"] = c.rho;
    in["digits"] = c.digits;
    in["precision"] = c.precision;
  }
  return in;
}

int run(Cfg& c) {
  if (c.format != "json" && c.format != "csv")
    throw UsageError("--format must be json or csv");
  std::string csv;
  std::string* want_csv = c.format == "csv" ? &csv : nullptr;
  json results;
  if (c.cmd == "sequence")
    results = run_sequence(c, want_csv);
  else if (c.cmd == "bracket")
    results = run_bracket(c, want_csv);
  else if (c.cmd == "ars")
    results = run_ars(c, want_csv);
  else if (c.cmd == "solve")
    results = run_solve(c, want_csv);
  else if (c.cmd == "expand")
    results = run_expand(c, want_csv);
  else if (c.cmd == "validate")
    results = run_validate(c, want_csv);
  else if (c.cmd == "integrable")
    results = run_integrable(c, want_csv);
  else if (c.cmd == "mgf")
    results = run_mgf(c, want_csv);
  else
    throw UsageError("unknown subcommand: " + c.cmd);

  std::string out;
  if (c.format == "csv") {
    if (csv.empty())
      throw UsageError("--format csv is not available for " + c.cmd);
    out = csv;
  } else {
    json report;
    report["schema"] = 1;
    report["command"] = c.cmd;
    report["inputs"] = echo_inputs(c);
    report["results"] = results;
    out = report.dump(2);
    out.push_back('\n');
  }
  if (c.output.empty()) {
    std::cout << out;
  } else {
    std::ofstream os(c.output, std::ios::binary);
    if (!os) throw UsageError("cannot open output file: " + c.output);
    os << out;
  }
  return 0;
}

void load_inputs(Cfg& c, const json& in) {
  auto gs = [&](const char* k, std::string& v) {
    if (in.contains(k)) v = in.at(k).get<std::string>();
  };
  auto gl = [&](const char* k, long& v) {
    if (in.contains(k)) v = in.at(k).get<long>();
  };
  auto gb = [&](const char* k, bool& v) {
    if (in.contains(k)) v = in.at(k).get<bool>();
  };
  gs("family", c.family);
  gl("d", c.d);
  gl("m", c.m);
  gl("t", c.t);
  gl("nu", c.nu);
  gs("omega", c.omega);
  gs("beta", c.beta);
  gl("n_max", c.n_max);
  gl("n0", c.n0);
  gl("n_lo", c.n_lo);
  gl("n_hi", c.n_hi);
  gl("order", c.order);
  gl("series_order", c.series_order);
  gl("precision", c.precision);
  gl("digits", c.digits);
  gs("beta_split", c.beta_split);
  gs("c_r", c.c_r);
  gs("rho", c.rho);
  gb("numeric", c.numeric);
  gb("compare_paper", c.compare_paper);
  if (in.contains("z")) c.z = in.at("z").get<std::vector<std::string>>();
}

}  // namespace

int main(int argc, char** argv) {
  Cfg c;
  CLI::App app{"psi-series expansions of quadratic tree recurrences"};
  app.require_subcommand(0, 1);
  std::string from_report;
  app.add_option("--from-report", from_report,
                 "re-run a previous JSON report from its echoed inputs");
  app.add_option("--output", c.output, "write the report to a file");

  auto add_common = [&](CLI::App* s, bool with_family) {
    if (with_family)
      s->add_option("--family", c.family,
                    "bst|mary|fringe|phylo|quadtree|relaxed-kd|partition|"
                    "boltzmann");
    s->add_option("--d", c.d, "bst / partition parameter");
    s->add_option("--m", c.m, "m-ary parameter");
    s->add_option("--t", c.t, "fringe parameter");
    s->add_option("--nu", c.nu, "Boltzmann parameter");
    s->add_option("--omega", c.omega, "partition weight (rational)");
    s->add_option("--beta", c.beta, "relaxed k-d exponent (rational)");
    s->add_option("--precision", c.precision, "working precision in bits");
    s->add_option("--digits", c.digits, "target / printed digits");
    s->add_option("--format", c.format, "json|csv");
    s->add_option("--output", c.output, "write the report to a file");
  };

  CLI::App* sq = app.add_subcommand("sequence", "evaluate the recurrence");
  add_common(sq, true);
  sq->add_option("--n-max", c.n_max, "last index");
  sq->add_flag("--numeric", c.numeric, "force floating point");

  CLI::App* sb = app.add_subcommand("bracket", "positivity-induction bound");
  add_common(sb, true);
  sb->add_option("--n0", c.n0, "induction cutoff");

  CLI::App* sa = app.add_subcommand("ars", "resonances + compatibility");
  add_common(sa, true);

  CLI::App* ss = app.add_subcommand("solve", "connection solve for (rho, c)");
  add_common(ss, true);
  ss->add_option("--beta-split", c.beta_split,
                 "matching point as a fraction of rho (rational)");
  ss->add_flag("--compare-paper", c.compare_paper,
               "attach reference constants with pass/fail");

  CLI::App* se = app.add_subcommand("expand", "symbolic asymptotic expansion");
  add_common(se, true);
  se->add_option("--order", c.order, "keep terms through n^-order");
  se->add_option("--c-r", c.c_r, "free resonance constant (rational)");

  CLI::App* sv = app.add_subcommand("validate", "expansion vs oracle");
  add_common(sv, true);
  sv->add_option("--order", c.order, "truncation order");
  sv->add_option("--c-r", c.c_r, "free resonance constant (rational)");
  sv->add_option("--n-lo", c.n_lo, "first sample index");
  sv->add_option("--n-hi", c.n_hi, "last sample index");
  sv->add_option("--beta-split", c.beta_split,
                 "matching point for the embedded solve");

  CLI::App* si = app.add_subcommand("integrable", "quadrature closed forms");
  si->add_option("--nu", c.nu, "1 or 2");
  si->add_option("--series-order", c.series_order, "series truncation");
  si->add_option("--n-lo", c.n_lo, "first prediction index");
  si->add_option("--n-hi", c.n_hi, "last prediction index");
  si->add_option("--precision", c.precision, "working precision in bits");
  si->add_option("--digits", c.digits, "printed digits");
  si->add_option("--format", c.format, "json|csv");
  si->add_option("--output", c.output, "write the report to a file");

  CLI::App* sm = app.add_subcommand("mgf", "MGF vs three-term formula");
  sm->add_option("--z", c.z, "sample points (rational), repeatable");
  sm->add_option("--rho", c.rho, "singularity (decimal; solved if omitted)");
  sm->add_option("--precision", c.precision, "working precision in bits");
  sm->add_option("--digits", c.digits, "printed / solve digits");
  sm->add_option("--format", c.format, "json|csv");
  sm->add_option("--output", c.output, "write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!from_report.empty()) {
      std::ifstream is(from_report);
      if (!is) throw UsageError("cannot open report: " + from_report);
      json rep = json::parse(is);
      if (!rep.contains("command") || !rep.contains("inputs"))
        throw UsageError("report lacks command/inputs");
      c.cmd = rep.at("command").get<std::string>();
      load_inputs(c, rep.at("inputs"));
      return run(c);
    }
    if (app.get_subcommands().empty())
      throw UsageError("a subcommand is required (see --help)");
    CLI::App* sub = app.get_subcommands().front();
    c.cmd = sub->get_name();
    if (c.cmd == "integrable" && sub->count("--n-lo") == 0 &&
        sub->count("--n-hi") == 0) {
      c.n_lo = 10;
      c.n_hi = 40;
    }
    if (c.cmd == "mgf" && c.z.empty()) c.z = {"10", "20", "30", "50"};
    return run(c);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "psitree: %s\n", e.what());
    return 2;
  } catch (const unsupported_error& e) {
    std::fprintf(stderr, "psitree: unsupported: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "psitree: %s\n", e.what());
    return 3;
  }
}
