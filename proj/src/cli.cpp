#include "qzrp/cli.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <type_traits>

#include <CLI11.hpp>
#include <json.hpp>

#include "qzrp/asymptotics.hpp"
#include "qzrp/cumulants.hpp"
#include "qzrp/simulator.hpp"
#include "qzrp/spectral_oracle.hpp"
#include "qzrp/tq_verify.hpp"

namespace qzrp::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr std::size_t kFdStateLimit = 400;

struct Request {
  std::string command;
  std::vector<std::string> args;
  std::string n, p, rho, q, alpha;
  std::string backend = "auto";
  unsigned prec = kDefaultPrecisionBits;
  double tol = 1e-12;
  int imax = -1;
  std::uint64_t seed = 0;
  double t_burn = -1.0;
  double t_measure = 1000.0;
  int reps = 100;
  std::string init = "stationary";
  std::string format;
  std::string out;
};

// ---------------------------------------------------------------------------
// Number parsing

struct NumberSpec {
  std::string text;
  bool exact = false;  // "a/b" or integer
};

NumberSpec parse_number(const std::string& text, const std::string& what) {
  static const std::regex exact_re(R"(^[+-]?\d+(/\d+)?$)");
  static const std::regex decimal_re(R"(^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$)");
  if (std::regex_match(text, exact_re)) {
    const auto slash = text.find('/');
    if (slash != std::string::npos && std::stoll(text.substr(slash + 1)) == 0)
      throw DomainError(what + ": zero denominator");
    return {text, true};
  }
  if (std::regex_match(text, decimal_re)) return {text, false};
  throw DomainError(what + ": '" + text + "' is neither a rational a/b nor a decimal");
}

Rational to_rational(const NumberSpec& spec) {
  using boost::multiprecision::mpz_int;
  const auto slash = spec.text.find('/');
  std::string num = spec.text.substr(0, slash);
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  const mpz_int n(num);
  const mpz_int d(slash == std::string::npos ? std::string("1") : spec.text.substr(slash + 1));
  return Rational(n, d);
}

Real to_real(const NumberSpec& spec) {
  if (spec.exact) return Real(to_rational(spec));
  return Real(spec.text);
}

double to_double(const NumberSpec& spec) {
  return spec.exact ? to_rational(spec).convert_to<double>() : std::stod(spec.text);
}

int parse_int(const std::string& text, const std::string& what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw DomainError(what + ": '" + text + "' is not an integer");
  return value;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(item, what));
  if (out.empty()) throw DomainError(what + ": empty list");
  return out;
}

// Locale-independent shortest round-trip formatting.
std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

template <class S>
std::string str(const S& x) {
  return ScalarTraits<S>::to_string(x);
}

// ---------------------------------------------------------------------------
// Model resolution

enum class Backend { rational, real };

bool has(const std::string& s) { return !s.empty(); }

Backend choose_backend(const Request& req) {
  bool needs_float = has(req.alpha);
  if (has(req.q) && !parse_number(req.q, "--q").exact) needs_float = true;
  if (has(req.rho) && !parse_number(req.rho, "--rho").exact) needs_float = true;
  if (req.backend == "rational") {
    if (needs_float) throw DomainError("--backend rational needs rational --q/--rho and no --alpha");
    return Backend::rational;
  }
  if (req.backend == "float") return Backend::real;
  if (req.backend != "auto") throw DomainError("--backend must be rational, float or auto");
  return needs_float ? Backend::real : Backend::rational;
}

std::string backend_label(Backend b, const Request& req) {
  return b == Backend::rational ? "rational" : "float(" + std::to_string(req.prec) + ")";
}

int require_N(const Request& req) {
  if (!has(req.n)) throw DomainError("--n is required");
  return parse_int(req.n, "--n");
}

/// p from --p, or from --rho as rho N (must be an integer).
int resolve_p(const Request& req, int N) {
  if (has(req.p) == has(req.rho)) throw DomainError("give exactly one of --p and --rho");
  if (has(req.p)) return parse_int(req.p, "--p");
  const auto spec = parse_number(req.rho, "--rho");
  if (spec.exact) {
    const Rational p = to_rational(spec) * N;
    if (denominator(p) != 1) throw DomainError("rho * N is not an integer");
    return numerator(p).convert_to<int>();
  }
  const double p = to_double(spec) * N;
  const double rounded = std::round(p);
  if (std::abs(p - rounded) > 1e-9) throw DomainError("rho * N is not an integer");
  return static_cast<int>(rounded);
}

/// q at the current precision: --q as given, or exp(-alpha/sqrt(N)).
template <class S>
S resolve_q(const Request& req, int N) {
  if (has(req.q) == has(req.alpha)) throw DomainError("give exactly one of --q and --alpha");
  if (has(req.q)) {
    const auto spec = parse_number(req.q, "--q");
    if constexpr (std::is_same_v<S, Rational>) return to_rational(spec);
    else return to_real(spec);
  } else {
    if constexpr (std::is_same_v<S, Rational>) {
      throw DomainError("--alpha needs the float backend");
    } else {
      const Real alpha = to_real(parse_number(req.alpha, "--alpha"));
      return Real(exp(-alpha / sqrt(Real(N))));
    }
  }
}

std::string q_label(const Request& req, int N) {
  if (has(req.q)) return req.q;
  return "exp(-(" + req.alpha + ")/sqrt(" + std::to_string(N) + "))";
}

json request_json(const Request& req) {
  json r;
  r["command"] = req.command;
  r["args"] = req.args;
  return r;
}

json header(const Request& req) {
  json j;
  j["schema"] = kSchemaVersion;
  j["command"] = req.command;
  j["request"] = request_json(req);
  return j;
}

template <class S>
struct Entry {
  std::string name;
  S value;
  S scale = S(0);  // see NamedValue::scale
};

template <class S>
using Named = std::vector<Entry<S>>;

/// Evaluates `values` on the chosen backend and writes each as a string.
/// Float results are accepted only after agreeing at twice the precision.
template <class Fn>
void fill_values(json& j, const Request& req, Backend backend, Fn&& values) {
  if (backend == Backend::rational) {
    for (const auto& e : values(std::type_identity<Rational>{})) j[e.name] = str(e.value);
    return;
  }
  const auto [vals, report] = compute_verified(req.prec, req.tol, [&] {
    std::vector<NamedValue> out;
    for (auto& e : values(std::type_identity<Real>{})) out.push_back(NamedValue{e.name, e.value, e.scale});
    return out;
  });
  for (const auto& v : vals) j[v.name] = str(v.value);
  j["precision"] = {{"bits", report.bits},
                    {"check_bits", report.check_bits},
                    {"max_rel_diff", report.max_rel_diff},
                    {"tolerance", req.tol}};
}

// ---------------------------------------------------------------------------
// Commands

template <class S>
Named<S> exact_values(const Request& req, int N, int p) {
  const auto params = ModelParams<S>::make(N, p, resolve_q<S>(req, N));
  const auto res = req.imax >= 0 ? delta_exact_truncated(params, req.imax) : delta_exact_resummed(params);
  const auto iq = intensive_quantities(params, res.J, std::optional<S>(res.Delta));
  Named<S> out = {{"Z", res.Zp},         {"J", res.J},
                  {"j_N", iq.j_N},       {"Delta", res.Delta},
                  {"Delta_j", *iq.Delta_j}, {"v_p", iq.v_p},
                  {"Delta_p", *iq.Delta_p}, {"pJ", res.pJ_term},
                  {"S1", res.S1},        {"S2", res.S2}};
  if (res.method == DeltaMethod::truncated) out.push_back({"tail_bound", res.tail_bound});
  return out;
}

json cmd_exact(const Request& req) {
  const int N = require_N(req);
  const int p = resolve_p(req, N);
  const Backend backend = choose_backend(req);
  json j = header(req);
  j["N"] = N;
  j["p"] = p;
  j["q"] = q_label(req, N);
  j["backend"] = backend_label(backend, req);

  json values;
  fill_values(values, req, backend, [&]<class S>(std::type_identity<S>) { return exact_values<S>(req, N, p); });
  for (const char* key : {"Z", "J", "j_N", "Delta", "Delta_j", "v_p", "Delta_p"}) j[key] = values[key];

  bool unity = false;
  if (backend == Backend::rational) unity = resolve_q<Rational>(req, N) == 1;
  json breakdown;
  breakdown["method"] = unity ? "unity" : (req.imax >= 0 ? "truncated" : "resummed");
  breakdown["pJ"] = values["pJ"];
  breakdown["S1"] = values["S1"];
  breakdown["S2"] = values["S2"];
  if (req.imax >= 0) {
    breakdown["i_max"] = req.imax;
    breakdown["tail_bound"] = values["tail_bound"];
  }
  j["breakdown"] = breakdown;
  if (values.contains("precision")) j["precision"] = values["precision"];
  return j;
}

template <class S>
Named<S> asymptotic_values(const Request& req) {
  if (!has(req.rho)) throw DomainError("--rho is required");
  const S rho = to_real(parse_number(req.rho, "--rho"));
  const auto q = QValue<S>::make(resolve_q<S>(req, 1));
  const S tol = boost::multiprecision::pow(S(2), -static_cast<int>(current_precision_bits()) + 24);
  const auto sd = saddle_data(rho, q, tol);
  const auto phi = result2_phi(sd);
  return {{"zstar", sd.zstar},       {"h0", sd.h[0]},
          {"h2", sd.h[2]},
          {"h3", sd.h[3]},           {"h4", sd.h[4]},
          {"free_energy", sd.free_energy}, {"j_inf", sd.j_inf},
          {"lambda", sd.lambda_nl},  {"A", sd.A},
          {"current_fss", sd.current_fss}, {"K", kpz_coefficient(sd)},
          {"phi1", phi[0]},          {"phi2", phi[1]},
          // Difference of two terms that cancel exactly at q = 0.
          {"K_result2", kpz_coefficient_result2(sd, phi[0], phi[1]),
           S(abs_value(kpz_coefficient_result2(sd, phi[0], S(0))) +
             abs_value(kpz_coefficient_result2(sd, S(0), phi[1])))}};
}

json cmd_asymptotic(const Request& req) {
  if (has(req.alpha)) throw DomainError("asymptotic takes --q, not --alpha");
  json j = header(req);
  j["rho"] = req.rho;
  j["q"] = req.q;
  j["backend"] = backend_label(Backend::real, req);
  // h1 is the saddle-point residual and is not reported.
  fill_values(j, req, Backend::real, [&]<class S>(std::type_identity<S>) {
    if constexpr (std::is_same_v<S, Rational>) {
      return Named<S>{};
    } else {
      return asymptotic_values<S>(req);
    }
  });
  return j;
}

json cmd_crossover(const Request& req) {
  if (!has(req.rho)) throw DomainError("--rho is required");
  if (!has(req.alpha)) throw DomainError("--alpha is required");
  const double rho = to_double(parse_number(req.rho, "--rho"));
  const double alpha = to_double(parse_number(req.alpha, "--alpha"));
  const auto c = crossover_prediction(rho, alpha, req.tol);
  json j = header(req);
  j["rho"] = c.rho;
  j["alpha"] = c.alpha;
  j["g"] = c.g;
  j["D"] = c.D_ew;
  j["nu"] = c.nu_ew;
  j["F"] = c.Fg;
  j["prediction"] = c.prediction;
  return j;
}

template <class S>
json oracle_json(const ModelParams<S>& params) {
  const auto gen = build_generator(params);
  const auto pi = stationary_vector(gen);
  const auto product = product_form_vector(params, gen.space);
  S deviation(0);
  for (std::size_t s = 0; s < pi.size(); ++s) deviation = std::max(deviation, abs_value(S(pi[s] - product[s])));
  const auto res = lambda_derivatives(gen, pi);
  json j;
  j["states"] = gen.space.size();
  j["J"] = str(res.J);
  j["Delta"] = str(res.Delta);
  j["lambda1"] = str(res.lambda1);
  j["lambda2"] = str(res.lambda2);
  j["product_form_max_deviation"] = str(deviation);
  if (gen.space.size() <= kFdStateLimit) {
    const auto fd = lambda_fd_cumulants(to_machine(gen));
    j["J_fd"] = format_double(static_cast<double>(fd.J));
    j["Delta_fd"] = format_double(static_cast<double>(fd.Delta));
  }
  return j;
}

json cmd_oracle(const Request& req) {
  const int N = require_N(req);
  const int p = resolve_p(req, N);
  const Backend backend = choose_backend(req);
  json j = header(req);
  j["N"] = N;
  j["p"] = p;
  j["q"] = q_label(req, N);
  json body;
  if (backend == Backend::rational) {
    j["backend"] = "rational";
    body = oracle_json(ModelParams<Rational>::make(N, p, resolve_q<Rational>(req, N)));
  } else {
    j["backend"] = "float(53)";
    double q = 0.0;
    {
      PrecisionScope scope(req.prec);
      q = resolve_q<Real>(req, N).convert_to<double>();
    }
    body = oracle_json(ModelParams<double>::make(N, p, q));
  }
  j.update(body);
  return j;
}

json cmd_simulate(const Request& req) {
  SimConfig cfg;
  cfg.N = require_N(req);
  cfg.p = resolve_p(req, cfg.N);
  {
    PrecisionScope scope(req.prec);
    cfg.q = resolve_q<Real>(req, cfg.N).convert_to<double>();
  }
  cfg.t_burn = req.t_burn;
  cfg.t_measure = req.t_measure;
  cfg.reps = req.reps;
  cfg.seed = req.seed;
  cfg.init = parse_sim_init(req.init);
  const auto est = estimate_cumulants(cfg);
  json j = header(req);
  j["N"] = cfg.N;
  j["p"] = cfg.p;
  j["q"] = q_label(req, cfg.N);
  j["seed"] = est.seed;
  j["init"] = sim_init_name(cfg.init);
  j["t_burn"] = cfg.burn_in();
  j["t_measure"] = cfg.t_measure;
  j["reps"] = est.reps;
  j["total_events"] = est.total_events;
  j["J_hat"] = est.J_hat;
  j["se_J"] = est.se_J;
  j["Delta_hat"] = est.Delta_hat;
  j["se_Delta"] = est.se_Delta;
  j["Delta_batch"] = est.Delta_batch;
  return j;
}

template <class S>
json tq_json(const ModelParams<S>& params, bool& ok) {
  const auto tq = tq_first_order(params);
  const auto check = verify_tq_first_order(tq, params);
  const S J = mean_current_J(params);
  const bool lambda_ok = negligible(S(check.lambda1 - J), J);
  const bool q1_ok = negligible(S(check.Q1_at_1 - S(params.p)), S(params.p));
  ok = check.ok && lambda_ok && q1_ok;
  auto strings = [](const Poly<S>& poly) {
    std::vector<std::string> out;
    for (const auto& c : poly) out.push_back(str(c));
    return out;
  };
  json j;
  j["ok"] = ok;
  j["residual"] = str(check.max_abs_residual);
  j["lambda1"] = str(check.lambda1);
  j["J"] = str(J);
  j["Q1_at_1"] = str(check.Q1_at_1);
  j["B1"] = strings(tq.B1);
  j["Q1"] = strings(tq.Q1);
  j["T1"] = strings(tq.T1);
  return j;
}

json cmd_verify_tq(const Request& req, bool& ok) {
  const int N = require_N(req);
  const int p = resolve_p(req, N);
  const Backend backend = choose_backend(req);
  json j = header(req);
  j["N"] = N;
  j["p"] = p;
  j["q"] = q_label(req, N);
  j["backend"] = backend_label(backend, req);
  if (backend == Backend::rational) {
    j.update(tq_json(ModelParams<Rational>::make(N, p, resolve_q<Rational>(req, N)), ok));
  } else {
    PrecisionScope scope(req.prec);
    j.update(tq_json(ModelParams<Real>::make(N, p, resolve_q<Real>(req, N)), ok));
  }
  return j;
}

struct SweepRow {
  int N = 0;
  int p = 0;
  std::string q;
  std::string J;
  std::string Delta;
  double J_value = 0.0;
  double Delta_value = 0.0;
  double over_N32 = 0.0;
  double over_N = 0.0;
  double prediction = 0.0;
  double gap = 0.0;
};

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "N,p,q,J,Delta,Delta_over_N32,Delta_over_N,prediction,gap\n";
  for (const auto& r : rows) {
    out += std::to_string(r.N) + ',' + std::to_string(r.p) + ',' + r.q + ',' + format_double(r.J_value) + ',' +
           format_double(r.Delta_value) + ',' + format_double(r.over_N32) + ',' + format_double(r.over_N) + ',' +
           format_double(r.prediction) + ',' + format_double(r.gap) + '\n';
  }
  return out;
}

std::vector<SweepRow> run_sweep(const Request& req) {
  if (!has(req.rho)) throw DomainError("sweep needs --rho");
  const auto Ns = parse_int_list(req.n, "--n");
  const Backend backend = choose_backend(req);
  const double rho = to_double(parse_number(req.rho, "--rho"));

  // Prediction: crossover limit of Delta/N for --alpha, KPZ limit of
  // Delta/N^{3/2} for q != 1, and rho (= Delta/N) at q = 1.
  enum class Kind { crossover, kpz, unity } kind;
  double prediction = 0.0;
  if (has(req.alpha)) {
    kind = Kind::crossover;
    prediction = crossover_prediction(rho, to_double(parse_number(req.alpha, "--alpha"))).prediction;
  } else {
    PrecisionScope scope(req.prec);
    const auto q = QValue<Real>::make(resolve_q<Real>(req, 1));
    if (q.is_unity()) {
      kind = Kind::unity;
      prediction = rho;
    } else {
      kind = Kind::kpz;
      const Real tol = boost::multiprecision::pow(Real(2), -static_cast<int>(req.prec) + 24);
      prediction = kpz_coefficient(saddle_data(to_real(parse_number(req.rho, "--rho")), q, tol))
                       .convert_to<double>();
    }
  }

  std::vector<SweepRow> rows;
  for (int N : Ns) {
    Request point = req;
    point.n = std::to_string(N);
    point.p.clear();
    point.imax = -1;
    const int p = resolve_p(point, N);
    json values;
    fill_values(values, point, backend, [&]<class S>(std::type_identity<S>) {
      const auto params = ModelParams<S>::make(N, p, resolve_q<S>(point, N));
      const auto res = delta_exact_resummed(params);
      return Named<S>{{"J", res.J}, {"Delta", res.Delta}};
    });
    SweepRow row;
    row.N = N;
    row.p = p;
    if (has(req.q)) {
      row.q = req.q;
    } else {
      PrecisionScope scope(req.prec);
      row.q = format_double(resolve_q<Real>(point, N).convert_to<double>());
    }
    row.J = values["J"].get<std::string>();
    row.Delta = values["Delta"].get<std::string>();
    PrecisionScope scope(req.prec);
    auto as_double = [](const std::string& s) {
      const auto slash = s.find('/');
      if (slash != std::string::npos) return to_rational(NumberSpec{s, true}).convert_to<double>();
      return Real(s).convert_to<double>();
    };
    row.J_value = as_double(row.J);
    row.Delta_value = as_double(row.Delta);
    row.over_N32 = row.Delta_value / std::pow(static_cast<double>(N), 1.5);
    row.over_N = row.Delta_value / N;
    row.prediction = prediction;
    const double observed = kind == Kind::kpz ? row.over_N32 : row.over_N;
    row.gap = observed / prediction - 1.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Argument wiring

void add_model_options(CLI::App* cmd, Request& req, bool with_n = true) {
  if (with_n) cmd->add_option("--n", req.n, "number of sites (comma-separated list for sweep)");
  cmd->add_option("--p", req.p, "number of particles");
  cmd->add_option("--rho", req.rho, "density p/N, as a/b or decimal");
  cmd->add_option("--q", req.q, "deformation parameter q > -1, as a/b (exact) or decimal (float)");
  cmd->add_option("--alpha", req.alpha, "crossover scaling: q = exp(-alpha/sqrt(N))");
}

void add_numeric_options(CLI::App* cmd, Request& req) {
  cmd->add_option("--backend", req.backend, "rational, float or auto");
  cmd->add_option("--prec", req.prec, "float mantissa bits (checked again at twice this)");
  cmd->add_option("--tol", req.tol, "relative tolerance of the precision check / quadrature");
}

void add_output_options(CLI::App* cmd, Request& req) {
  cmd->add_option("--format", req.format, "json or csv");
  cmd->add_option("--out", req.out, "write the result to this file instead of stdout");
}

}  // namespace

Output run(const std::vector<std::string>& args) {
  Request req;
  req.args = args;
  CLI::App app{"Current cumulants of the q-boson zero-range process on a ring", "qzrp"};
  app.require_subcommand(1);

  auto* exact = app.add_subcommand("exact", "exact J and Delta from coefficient extraction");
  add_model_options(exact, req);
  add_numeric_options(exact, req);
  add_output_options(exact, req);
  exact->add_option("--imax", req.imax, "evaluate the i-sum term by term with this many terms");

  auto* oracle = app.add_subcommand("oracle", "J and Delta by perturbation theory on the full generator");
  add_model_options(oracle, req);
  add_numeric_options(oracle, req);
  add_output_options(oracle, req);

  auto* simulate = app.add_subcommand("simulate", "continuous-time Monte Carlo estimate of J and Delta");
  add_model_options(simulate, req);
  add_numeric_options(simulate, req);
  add_output_options(simulate, req);
  simulate->add_option("--seed", req.seed, "64-bit seed");
  simulate->add_option("--t-burn", req.t_burn, "burn-in time (default 10 N^2)");
  simulate->add_option("--t-measure", req.t_measure, "measurement window");
  simulate->add_option("--reps", req.reps, "independent replicas");
  simulate->add_option("--init", req.init, "stationary, all-equal or single-pile");

  auto* asymptotic = app.add_subcommand("asymptotic", "saddle point, KPZ constants and predicted Delta/N^{3/2}");
  add_model_options(asymptotic, req, false);
  add_numeric_options(asymptotic, req);
  add_output_options(asymptotic, req);

  auto* crossover = app.add_subcommand("crossover", "EW-KPZ crossover prediction for Delta/N");
  add_model_options(crossover, req, false);
  add_numeric_options(crossover, req);
  add_output_options(crossover, req);

  auto* verify_tq = app.add_subcommand("verify-tq", "first-order T-Q relation check");
  add_model_options(verify_tq, req);
  add_numeric_options(verify_tq, req);
  add_output_options(verify_tq, req);

  auto* sweep = app.add_subcommand("sweep", "exact Delta over a grid of N with the asymptotic prediction");
  add_model_options(sweep, req);
  add_numeric_options(sweep, req);
  add_output_options(sweep, req);

  Output result;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    result.out = app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = kBadInput;
    result.err = e.what();
    return result;
  }

  try {
    const auto* chosen = app.get_subcommands().front();
    req.command = chosen->get_name();
    const bool is_sweep = req.command == "sweep";
    if (req.format.empty()) req.format = is_sweep ? "csv" : "json";
    if (req.format != "json" && req.format != "csv") throw DomainError("--format must be json or csv");
    if (req.format == "csv" && !is_sweep) throw DomainError("csv output is available for sweep only");

    std::string document;
    if (is_sweep) {
      const auto rows = run_sweep(req);
      if (req.format == "csv") {
        document = sweep_csv(rows);
      } else {
        json j = header(req);
        j["rows"] = json::array();
        for (const auto& r : rows) {
          j["rows"].push_back({{"N", r.N}, {"p", r.p}, {"q", r.q}, {"J", r.J}, {"Delta", r.Delta},
                               {"Delta_over_N32", r.over_N32}, {"Delta_over_N", r.over_N},
                               {"prediction", r.prediction}, {"gap", r.gap}});
        }
        document = j.dump(2) + "\n";
      }
    } else {
      json j;
      bool ok = true;
      if (req.command == "exact") j = cmd_exact(req);
      else if (req.command == "oracle") j = cmd_oracle(req);
      else if (req.command == "simulate") j = cmd_simulate(req);
      else if (req.command == "asymptotic") j = cmd_asymptotic(req);
      else if (req.command == "crossover") j = cmd_crossover(req);
      else if (req.command == "verify-tq") j = cmd_verify_tq(req, ok);
      document = j.dump(2) + "\n";
      if (!ok) {
        result.exit_code = kPrecisionFailure;
        result.err = "first-order T-Q identity not satisfied";
      }
    }

    if (!req.out.empty()) {
      std::ofstream file(req.out);
      if (!file) throw DomainError("cannot open --out file '" + req.out + "'");
      file << document;
    } else {
      result.out = std::move(document);
    }
  } catch (const DomainError& e) {
    result.exit_code = kBadInput;
    result.err = e.what();
  } catch (const std::out_of_range& e) {
    result.exit_code = kBadInput;
    result.err = e.what();
  } catch (const PrecisionError& e) {
    result.exit_code = kPrecisionFailure;
    result.err = e.what();
  } catch (const SolverError& e) {
    result.exit_code = kSolverFailure;
    result.err = e.what();
  }
  return result;
}

}  // namespace qzrp::cli
