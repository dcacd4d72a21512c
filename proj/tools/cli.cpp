#include "cli.hpp"

#include <omp.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "tdi/bounds.hpp"
#include "tdi/errors.hpp"
#include "tdi/vaughan.hpp"

namespace tdi::cli {

using ojson = nlohmann::ordered_json;

namespace {

// Flat or nested JSON objects as CLI11 config items; nested objects address
// subcommands.
class ConfigJSON : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return {};
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    return items(j, "", {});
  }

 private:
  static std::string scalar(const nlohmann::json& v, const std::string& name) {
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    if (v.is_string()) return v.get<std::string>();
    throw CLI::ConversionError("config key " + name + " has an unsupported value type");
  }

  std::vector<CLI::ConfigItem> items(const nlohmann::json& j, const std::string& name,
                                     const std::vector<std::string>& prefix) const {
    std::vector<CLI::ConfigItem> out;
    if (j.is_object()) {
      auto sub_prefix = prefix;
      if (!name.empty()) sub_prefix.push_back(name);
      for (auto it = j.begin(); it != j.end(); ++it) {
        auto sub = items(*it, it.key(), sub_prefix);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    CLI::ConfigItem item;
    item.name = name;
    item.parents = prefix;
    if (j.is_array()) {
      for (const auto& v : j) item.inputs.push_back(scalar(v, name));
    } else {
      item.inputs.push_back(scalar(j, name));
    }
    out.push_back(std::move(item));
    return out;
  }
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Result {
  ojson summary;
  std::optional<Table> table;
  int status = kOk;
};

Params resolve_params(const RunConfig& cfg) {
  if (cfg.has_N && cfg.has_X)
    throw ConstraintError("constraint violated: give either N or X, not both");
  if (!cfg.has_N && !cfg.has_X) throw ConstraintError("constraint violated: N or X required");
  const double N = cfg.has_N ? cfg.N : N_for_X(cfg.X, cfg.c);
  return derive_params(cfg.c, cfg.tau, cfg.delta, N, cfg.mu,
                       cfg.has_Y ? std::optional<double>(cfg.Y) : std::nullopt);
}

double run_eps(const RunConfig& cfg, const Params& p) {
  if (!cfg.has_eps) return p.eps;
  if (!(cfg.eps_override > 0.0))
    throw ConstraintError("constraint violated: eps > 0 (got " +
                          format_number(cfg.eps_override) + ")");
  return cfg.eps_override;
}

ojson base_summary(const RunConfig& cfg, const Params& p) {
  ojson j;
  j["command"] = cfg.command;
  j["params"] = to_json(p);
  return j;
}

std::vector<double> alpha_grid(const RunConfig& cfg, const Params& p, int default_points) {
  const double lo = cfg.has_alpha_range ? cfg.alpha_min : -p.P;
  const double hi = cfg.has_alpha_range ? cfg.alpha_max : p.P;
  if (!(hi >= lo)) throw ConstraintError("constraint violated: alpha-min <= alpha-max");
  const int n = cfg.points > 0 ? cfg.points : default_points;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

Result cmd_params(const RunConfig& cfg) {
  const Params p = resolve_params(cfg);
  Result r;
  r.summary = base_summary(cfg, p);
  const ojson pj = to_json(p);
  Table t;
  std::vector<std::string> row;
  for (const auto& [k, v] : pj.items()) {
    t.header.push_back(k);
    row.push_back(v.is_number_integer() ? std::to_string(v.get<long>())
                                        : format_number(v.get<double>()));
  }
  t.rows.push_back(row);
  r.table = t;
  return r;
}

Result cmd_sieve(const RunConfig& cfg) {
  const Params p = resolve_params(cfg);
  const std::uint64_t lo = cfg.lo ? cfg.lo : static_cast<std::uint64_t>(std::floor(p.X / 2));
  const std::uint64_t hi = cfg.hi ? cfg.hi : static_cast<std::uint64_t>(std::floor(p.X));
  const auto primes = sieve_primes(lo, hi);
  Result r;
  r.summary = base_summary(cfg, p);
  r.summary["lo"] = lo;
  r.summary["hi"] = hi;
  r.summary["count"] = primes.size();
  if (!primes.empty()) {
    r.summary["first"] = primes.front();
    r.summary["last"] = primes.back();
  }
  Table t{{"p"}, {}};
  for (auto q : primes) t.rows.push_back({std::to_string(q)});
  r.table = t;
  return r;
}

Result cmd_chi_dump(const RunConfig& cfg) {
  const Params p = resolve_params(cfg);
  const CupFunction f = make_cup(p.Y, p.r);
  const int n = cfg.points > 0 ? cfg.points : 1001;
  Table t{{"t", "chi", "chi_series", "abs_diff"}, {}};
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / n;
    const double exact = chi_eval(f, x);
    const double series = chi_via_series(f, x);
    worst = std::max(worst, std::abs(exact - series));
    t.rows.push_back({format_number(x), format_number(exact), format_number(series),
                      format_number(std::abs(exact - series))});
  }
  Result r;
  r.summary = base_summary(cfg, p);
  r.summary["cup"] = {{"Y", f.Y},       {"Delta", f.Delta},   {"r", f.r},
                      {"a", f.a},       {"M_trunc", f.M_trunc}, {"tail_bound", f.tail_bound}};
  r.summary["points"] = n;
  r.summary["max_abs_diff"] = worst;
  r.table = t;
  return r;
}

Result cmd_expsum(const RunConfig& cfg) {
  const Params p = resolve_params(cfg);
  const PrimeTable table = build_table(p);
  SumRequest req;
  if (cfg.kind == "S") {
    req.kind = SumKind::S;
  } else if (cfg.kind == "U") {
    req.kind = SumKind::U;
    req.m = cfg.m;
  } else if (cfg.kind == "H" || cfg.kind == "V") {
    req.kind = cfg.kind == "H" ? SumKind::H : SumKind::V;
    req.cup = make_cup(p.Y, p.r);
    req.m_max = cfg.m_max;
  } else {
    throw ConstraintError("constraint violated: kind in {S, U, H, V} (got " + cfg.kind + ")");
  }
  const auto alphas = alpha_grid(cfg, p, 101);
  const auto vals = grid_eval(table, req, alphas);

  Table t{{"alpha", "re", "im", "abs"}, {}};
  double peak = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    peak = std::max(peak, std::abs(vals[i]));
    t.rows.push_back({format_number(alphas[i]), format_number(vals[i].real()),
                      format_number(vals[i].imag()), format_number(std::abs(vals[i]))});
  }
  Result r;
  r.summary = base_summary(cfg, p);
  r.summary["kind"] = cfg.kind;
  if (req.kind == SumKind::U) r.summary["m"] = cfg.m;
  r.summary["primes"] = table.size();
  r.summary["points"] = alphas.size();
  r.summary["max_abs"] = peak;
  if (req.kind == SumKind::V) {
    const long mm = cfg.m_max > 0 ? cfg.m_max : default_m_max(*req.cup);
    r.summary["m_max"] = mm;
    r.summary["tail_bound"] = log_mass(table) * cup_tail_bound(req.cup->Delta, req.cup->r, mm);
  }
  r.table = t;
  return r;
}

Result cmd_vaughan(const RunConfig& cfg) {
  const Params p = resolve_params(cfg);
  const PrimeTable table = build_table(p);
  const VaughanPieces v = decompose(table, cfg.alpha, cfg.m);
  const cplx direct = u_alpha(table, cfg.alpha, cfg.m);
  const cplx base = u_alpha(table, cfg.alpha, 0);
  const double scale = std::max(std::abs(base), 1e-300);
  const double disc = std::abs(direct - v.reconstruct()) / scale;

  auto c2j = [](cplx z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; };
  Result r;
  r.summary = base_summary(cfg, p);
  r.summary["alpha"] = cfg.alpha;
  r.summary["m"] = cfg.m;
  r.summary["u_cut"] = v.u_cut;
  r.summary["signs"] = {v.signs.u1, v.signs.u2, v.signs.u3, v.signs.u4};
  r.summary["U1"] = c2j(v.u1);
  r.summary["U2"] = c2j(v.u2);
  r.summary["U3"] = c2j(v.u3);
  r.summary["U4"] = c2j(v.u4);
  r.summary["prime_power_corr"] = c2j(v.prime_power_corr);
  r.summary["reconstructed"] = c2j(v.reconstruct());
  r.summary["direct"] = c2j(direct);
  r.summary["discrepancy"] = disc;
  Table t{{"piece", "re", "im"}, {}};
  const std::pair<const char*, cplx> rows[] = {{"U1", v.u1}, {"U2", v.u2}, {"U3", v.u3},
                                               {"U4", v.u4}, {"corr", v.prime_power_corr},
                                               {"direct", direct}};
  for (const auto& [name, z] : rows)
    t.rows.push_back({name, format_number(z.real()), format_number(z.imag())});
  r.table = t;
  if (disc >= 1e-6) {
    r.summary["error"] = "Vaughan reconstruction discrepancy above 1e-6";
    r.status = kVerification;
  }
  return r;
}

Result cmd_bounds(const RunConfig& cfg) {
  const Params p = resolve_params(cfg);
  Result r;
  r.summary = base_summary(cfg, p);
  r.summary["lemma"] = cfg.lemma;
  BoundReport rep;

  if (cfg.lemma == "vdc") {
    const double beta = cfg.beta;
    const int k = cfg.k;
    if (k != 2 && k != 3) throw ConstraintError("constraint violated: k in {2, 3}");
    PhaseFunction f{[=](double x) { return beta * std::pow(x, k); },
                    [=](double) { return k == 2 ? 2.0 * beta : 6.0 * beta; }};
    rep = vdc_check(f, cfg.a, cfg.b, k, k == 2 ? 2.0 * beta : 6.0 * beta);
  } else if (cfg.lemma == "weyl") {
    const int n = cfg.points > 0 ? cfg.points : 64;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g;
    std::vector<cplx> a(n);
    for (auto& z : a) z = {g(rng), g(rng)};
    rep = weyl_vdc_check(a, cfg.Q);
  } else if (cfg.lemma == "l2s" || cfg.lemma == "l2v") {
    const PrimeTable table = build_table(p);
    if (cfg.lemma == "l2s") {
      rep = l2_s_integral(table, p.P);
    } else {
      const CupFunction f = make_cup(p.Y, p.r);
      rep = l2_v_integral(table, f, p.P, cfg.m_max > 0 ? cfg.m_max : default_m_max(f));
    }
  } else if (cfg.lemma == "vmax") {
    const PrimeTable table = build_table(p);
    const CupFunction f = make_cup(p.Y, p.r);
    rep = vmax_scan(table, f, p.P, cfg.points > 0 ? cfg.points : 201, cfg.m_max);
    const QChoice qc = q_choice(p);
    r.summary["q_choice"] = {{"Q", qc.Q},
                             {"raw", qc.raw},
                             {"degenerate", qc.degenerate},
                             {"within_envelope", qc.within_envelope}};
  } else if (cfg.lemma == "regime") {
    PhaseProbe probe;
    probe.alpha = cfg.alpha;
    probe.m = cfg.m;
    probe.d = cfg.d;
    probe.q = cfg.q;
    probe.c = p.c;
    probe.l_lo = cfg.l_lo > 0 ? cfg.l_lo : p.X / (2.0 * cfg.d);
    probe.l_hi = cfg.l_hi > 0 ? cfg.l_hi : p.X / cfg.d;
    const RegimeReport rr = phase_regime(probe);
    r.summary["probe"] = {{"alpha", probe.alpha}, {"m", probe.m},     {"d", probe.d},
                          {"q", probe.q},         {"l_lo", probe.l_lo}, {"l_hi", probe.l_hi}};
    r.summary["regime"] = to_json(rr);
    Table t{{"ratio", "regime", "shifted_ratio", "shifted_regime"},
            {{format_number(rr.ratio), rr.regime, format_number(rr.shifted_ratio),
              rr.shifted_regime}}};
    r.table = t;
    return r;
  } else {
    throw ConstraintError("constraint violated: lemma in {vdc, weyl, l2s, l2v, vmax, regime}");
  }

  r.summary["report"] = to_json(rep);
  Table t{{"lhs", "rhs", "ratio", "verdict"},
          {{format_number(rep.lhs), format_number(rep.rhs), format_number(rep.ratio),
            to_string(rep.verdict)}}};
  r.table = t;
  return r;
}

Result cmd_solve(const RunConfig& cfg) {
  const Params p = resolve_params(cfg);
  const double eps = run_eps(cfg, p);
  const PrimeTable table = build_table(p);
  const TripleReport rep = find_triples(table, p.N, eps, p.Y, cfg.budget_triples);

  const CupFunction f = make_cup(p.Y, p.r);
  const SelbergMinorant s = make_minorant(p.mu);
  const SmoothedSum i1 = i1_direct(table, f, s, p.N, eps, cfg.window);
  const I1Check chk = check_i1_bound(i1, rep);

  Result r;
  r.summary = base_summary(cfg, p);
  r.summary["eps_used"] = eps;
  r.summary["report"] = to_json(rep);
  if (!rep.count_only) {
    const UnorderedCounts u = unordered_counts(rep);
    r.summary["unordered"] = {{"all_distinct", u.all_distinct},
                              {"one_repeat", u.one_repeat},
                              {"all_equal", u.all_equal},
                              {"closed_under_permutation", u.closed}};
  }
  r.summary["i1"] = to_json(i1);
  r.summary["i1_bound"] = chk.bound;

  Table t{{"p1", "p2", "p3", "sum", "deviation"}, {}};
  for (const auto& tr : rep.triples) {
    const double sum = power_c(tr[0], p.c) + power_c(tr[1], p.c) + power_c(tr[2], p.c);
    t.rows.push_back({std::to_string(tr[0]), std::to_string(tr[1]), std::to_string(tr[2]),
                      format_number(sum), format_number(sum - p.N)});
  }
  r.table = t;
  return r;
}

Result cmd_scaling(const RunConfig& cfg) {
  ScalingConfig sc;
  sc.c = cfg.c;
  sc.tau = cfg.tau;
  sc.delta = cfg.delta;
  sc.mu = cfg.mu;
  if (cfg.y_mode == "fixed") {
    sc.mode = YMode::fixed;
    sc.Y0 = cfg.has_Y ? cfg.Y : 0.25;
  } else if (cfg.y_mode == "formula") {
    sc.mode = YMode::formula;
  } else {
    throw ConstraintError("constraint violated: y-mode in {fixed, formula}");
  }
  sc.triple_budget = cfg.budget_triples;
  const ScalingStudy st = scaling_study(sc, cfg.X_grid);

  Result r;
  r.summary["command"] = cfg.command;
  r.summary["config"] = {{"c", sc.c},         {"tau", sc.tau},
                         {"delta", sc.delta}, {"mu", sc.mu},
                         {"y_mode", cfg.y_mode}, {"Y0", sc.Y0}};
  auto rows = ojson::array();
  for (std::size_t i = 0; i < st.rows.size(); ++i) {
    ojson row = to_json(st.rows[i]);
    row["params"] = to_json(derive_params(
        sc.c, sc.tau, sc.delta, st.rows[i].N, sc.mu,
        sc.mode == YMode::fixed ? std::optional<double>(sc.Y0) : std::nullopt));
    rows.push_back(row);
  }
  r.summary["rows"] = rows;
  r.summary["fitted_slope"] = st.fitted_slope;
  r.summary["analytic_slope"] = st.analytic_slope;
  r.summary["ratio_spread"] = st.ratio_spread;

  Table t{{"X", "eps", "Y", "gamma", "predictor", "ratio", "slope"}, {}};
  for (const auto& row : st.rows)
    t.rows.push_back({format_number(row.X), format_number(row.eps), format_number(row.Y),
                      format_number(row.gamma), format_number(row.predictor),
                      format_number(row.ratio), format_number(st.fitted_slope)});
  r.table = t;
  return r;
}

void write_csv(std::ostream& os, const ojson& summary, const Table& t) {
  const ojson snapshot = summary.contains("params") ? summary["params"] : summary["config"];
  os << "# params " << snapshot.dump() << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

void emit(const RunConfig& cfg, const Result& r, std::ostream& out) {
  if (cfg.format == "csv" && r.table)
    write_csv(out, r.summary, *r.table);
  else
    out << r.summary.dump(2) << '\n';

  if (cfg.out.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out);
  const fs::path dir(cfg.out);
  std::ofstream js(dir / (cfg.command + ".json"));
  js << r.summary.dump(2) << '\n';
  if (r.table) {
    std::ofstream cs(dir / (cfg.command + ".csv"));
    write_csv(cs, r.summary, *r.table);
  }
  if (!js) throw std::runtime_error("could not write artifacts to " + cfg.out);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Numerical toolkit for prime triples p1^c + p2^c + p3^c near N with sqrt(p) near an integer", "tdi"};
  app.config_formatter(std::make_shared<ConfigJSON>());
  app.set_config("--config", "", "JSON file with option values; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--c", cfg.c, "exponent c, 1 < c < tau");
  app.add_option("--tau", cfg.tau, "tau < 35/34");
  app.add_option("--delta", cfg.delta, "delta > 0");
  app.add_option("--mu", cfg.mu, "minorant transform support, mu > 1/2");
  app.add_option("--N", cfg.N, "target N");
  app.add_option("--X", cfg.X, "range parameter; sets N = 2 X^c");
  app.add_option("--Y", cfg.Y, "near-square threshold override");
  app.add_option("--eps-override", cfg.eps_override, "solver tolerance in place of X^(c-tau)");
  app.add_option("--alpha-min", cfg.alpha_min, "alpha grid start (default -P)");
  app.add_option("--alpha-max", cfg.alpha_max, "alpha grid end (default P)");
  app.add_option("--points", cfg.points, "grid points / sequence length");
  app.add_option("--m-max", cfg.m_max, "truncation of V (default ceil(r/Delta))");
  app.add_option("--threads", cfg.threads, "OpenMP worker cap");
  app.add_option("--out", cfg.out, "artifact directory");
  app.add_option("--format", cfg.format, "stdout format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--budget-triples", cfg.budget_triples, "stored-triple cap before count-only");
  app.add_option("--lo", cfg.lo, "sieve lower end (exclusive)");
  app.add_option("--hi", cfg.hi, "sieve upper end (inclusive)");
  app.add_option("--kind", cfg.kind, "expsum: S, U, H or V");
  app.add_option("--alpha", cfg.alpha, "alpha for vaughan-check and regime");
  app.add_option("--m", cfg.m, "m for U, vaughan-check and regime");
  app.add_option("--lemma", cfg.lemma, "bounds: vdc, weyl, l2s, l2v, vmax or regime");
  app.add_option("--beta", cfg.beta, "vdc: f(x) = beta x^k");
  app.add_option("--k", cfg.k, "vdc: derivative order (2 or 3)");
  app.add_option("--a", cfg.a, "vdc: interval start");
  app.add_option("--b", cfg.b, "vdc: interval end");
  app.add_option("--Q", cfg.Q, "weyl: shift range");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--d", cfg.d, "regime: d");
  app.add_option("--q", cfg.q, "regime: shift q");
  app.add_option("--l-lo", cfg.l_lo, "regime: l range start (default X/(2d))");
  app.add_option("--l-hi", cfg.l_hi, "regime: l range end (default X/d)");
  app.add_option("--window", cfg.window, "solve: minorant window in units of eps");
  app.add_option("--X-grid", cfg.X_grid, "scaling: X values")->delimiter(',');
  app.add_option("--y-mode", cfg.y_mode, "scaling: fixed or formula");

  const char* const names[] = {"params", "sieve",  "chi-dump", "expsum",
                               "vaughan-check", "bounds", "solve", "scaling"};
  for (const char* n : names) app.add_subcommand(n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ConfigError& e) {
    err << "error: config file: " << e.what() << '\n';
    return kConstraint;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConstraint;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.has_N = app.count("--N") > 0;
  cfg.has_X = app.count("--X") > 0;
  cfg.has_Y = app.count("--Y") > 0;
  cfg.has_eps = app.count("--eps-override") > 0;
  cfg.has_alpha_range = app.count("--alpha-min") > 0 || app.count("--alpha-max") > 0;
  if (cfg.has_alpha_range && !(app.count("--alpha-min") && app.count("--alpha-max"))) {
    err << "error: constraint violated: alpha-min and alpha-max go together\n";
    return kConstraint;
  }
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

  try {
    Result r;
    if (cfg.command == "params") r = cmd_params(cfg);
    else if (cfg.command == "sieve") r = cmd_sieve(cfg);
    else if (cfg.command == "chi-dump") r = cmd_chi_dump(cfg);
    else if (cfg.command == "expsum") r = cmd_expsum(cfg);
    else if (cfg.command == "vaughan-check") r = cmd_vaughan(cfg);
    else if (cfg.command == "bounds") r = cmd_bounds(cfg);
    else if (cfg.command == "solve") r = cmd_solve(cfg);
    else r = cmd_scaling(cfg);
    emit(cfg, r, out);
    if (r.status != kOk) err << "error: " << r.summary.value("error", "verification failed") << '\n';
    return r.status;
  } catch (const ConstraintError& e) {
    err << "error: " << e.what() << '\n';
    return kConstraint;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << '\n';
    return kConstraint;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const VerificationError& e) {
    err << "error: " << e.what() << '\n';
    return kVerification;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace tdi::cli
